#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cmath>
#include <numbers>
#include <span>

namespace rodo {

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar normalize_angle(Scalar angle) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar wrapped = std::remainder(angle, Scalar(2) * pi);
  if (wrapped <= -pi) wrapped += Scalar(2) * pi;
  return wrapped;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> rotation2(Scalar theta) {
  const Scalar c = std::cos(theta);
  const Scalar s = std::sin(theta);
  Eigen::Matrix<Scalar, 2, 2> r;
  r << c, -s, s, c;
  return r;
}

/// Rigid transform in the plane. Acts on points as R(theta) * p + t.
template <typename Scalar>
class Pose2 {
 public:
  using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
  using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
  using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

  Pose2() : translation_(Vector2::Zero()), theta_(0) {}
  Pose2(Scalar x, Scalar y, Scalar theta) : translation_(x, y), theta_(normalize_angle(theta)) {}
  Pose2(const Vector2& translation, Scalar theta)
      : translation_(translation), theta_(normalize_angle(theta)) {}
  explicit Pose2(const Vector3& xytheta) : Pose2(xytheta(0), xytheta(1), xytheta(2)) {}

  static Pose2 Identity() { return Pose2(); }

  Scalar x() const { return translation_.x(); }
  Scalar y() const { return translation_.y(); }
  Scalar theta() const { return theta_; }
  const Vector2& translation() const { return translation_; }
  Matrix2 rotation() const { return rotation2(theta_); }
  Vector3 vector() const { return Vector3(translation_.x(), translation_.y(), theta_); }

  Vector2 operator*(const Vector2& p) const { return rotation() * p + translation_; }
  Pose2 operator*(const Pose2& other) const {
    return Pose2(rotation() * other.translation_ + translation_, theta_ + other.theta_);
  }
  Pose2 inverse() const {
    return Pose2(-(rotation().transpose() * translation_), -theta_);
  }

  /// Transform relative to `from`: from^-1 * this.
  Pose2 relative_to(const Pose2& from) const { return from.inverse() * *this; }

  template <typename Other>
  Pose2<Other> cast() const {
    return Pose2<Other>(translation_.template cast<Other>(), static_cast<Other>(theta_));
  }

  bool operator==(const Pose2& other) const {
    return translation_ == other.translation_ && theta_ == other.theta_;
  }

 private:
  Vector2 translation_;
  Scalar theta_;
};

using Pose2d = Pose2<double>;

/// Body-frame planar velocity (vx, vy, omega).
template <typename Scalar>
struct Velocity2 {
  using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

  Vector2 linear = Vector2::Zero();
  Scalar angular = 0;

  Velocity2() = default;
  Velocity2(Scalar vx, Scalar vy, Scalar omega) : linear(vx, vy), angular(omega) {}

  Scalar vx() const { return linear.x(); }
  Scalar vy() const { return linear.y(); }
  Scalar omega() const { return angular; }

  bool is_zero() const { return linear.isZero(0) && angular == Scalar(0); }

  /// Constant-velocity displacement over dt: rotation R(dt*omega), translation dt*v.
  Pose2<Scalar> displacement(Scalar dt) const { return Pose2<Scalar>(dt * linear, dt * angular); }

  static Velocity2 from_displacement(const Pose2<Scalar>& delta, Scalar dt) {
    Velocity2 v;
    v.linear = delta.translation() / dt;
    v.angular = delta.theta() / dt;
    return v;
  }

  Velocity2 operator-() const { return Velocity2(-linear.x(), -linear.y(), -angular); }
};

using Velocity2d = Velocity2<double>;

/// Least-squares rigid transform T minimizing sum |dst_i - T * src_i|^2 (closed form via the
/// 2x2 cross-covariance). Requires at least one pair; a single pair yields a pure translation.
template <typename Scalar>
Pose2<Scalar> fit_rigid_transform(std::span<const Eigen::Matrix<Scalar, 2, 1>> src,
                                  std::span<const Eigen::Matrix<Scalar, 2, 1>> dst) {
  using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
  assert(src.size() == dst.size() && !src.empty());
  Vector2 src_mean = Vector2::Zero();
  Vector2 dst_mean = Vector2::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    src_mean += src[i];
    dst_mean += dst[i];
  }
  src_mean /= static_cast<Scalar>(src.size());
  dst_mean /= static_cast<Scalar>(dst.size());

  // In 2D the optimal angle is atan2 of the antisymmetric / symmetric parts of the correlation.
  Scalar sin_sum = 0;
  Scalar cos_sum = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vector2 a = src[i] - src_mean;
    const Vector2 b = dst[i] - dst_mean;
    cos_sum += a.dot(b);
    sin_sum += a.x() * b.y() - a.y() * b.x();
  }
  const Scalar theta = (sin_sum == Scalar(0) && cos_sum == Scalar(0)) ? Scalar(0)
                                                                      : std::atan2(sin_sum, cos_sum);
  const Vector2 t = dst_mean - rotation2(theta) * src_mean;
  return Pose2<Scalar>(t, theta);
}

}  // namespace rodo
