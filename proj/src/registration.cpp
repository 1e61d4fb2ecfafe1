#include "rodo/registration.hpp"

#include <Eigen/Cholesky>

#include <fmt/format.h>

namespace rodo {

namespace {

constexpr int kMaxStepHalvings = 8;

Eigen::Matrix2d rotation_derivative(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d d;
  d << -s, -c, c, -s;
  return d;
}

struct NormalEquations {
  double cost = 0.0;
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
};

NormalEquations linearize(const SurfacePointSet& scan, std::span<const RegistrationTarget> keyframes,
                          std::span<const Correspondence> correspondences, const Pose2d& pose, double delta) {
  NormalEquations eq;
  const Eigen::Matrix2d rot = pose.rotation();
  const Eigen::Matrix2d drot = rotation_derivative(pose.theta());
  for (const Correspondence& c : correspondences) {
    const Eigen::Vector2d& src = scan.points[static_cast<std::size_t>(c.source_index)].mean;
    const Eigen::Vector2d& tgt =
        keyframes[static_cast<std::size_t>(c.keyframe_index)].points().points[static_cast<std::size_t>(c.target_index)].mean;
    const Eigen::Vector2d e = tgt - (rot * src + pose.translation());
    const double s = e.squaredNorm();
    eq.cost += c.weight * huber_loss(s, delta);

    Eigen::Matrix<double, 2, 3> jac;
    jac.leftCols<2>() = -Eigen::Matrix2d::Identity();
    jac.col(2) = -(drot * src);
    const double w = c.weight * huber_derivative(s, delta);
    eq.hessian.noalias() += w * jac.transpose() * jac;
    eq.rhs.noalias() += w * jac.transpose() * e;
  }
  return eq;
}

}  // namespace

double residual_weight(const SurfacePoint& source, const SurfacePoint& target) {
  return similarity(source.planarity, target.planarity) +
         similarity(static_cast<double>(source.point_count), static_cast<double>(target.point_count)) +
         std::max(source.normal.dot(target.normal), 0.0);
}

RegistrationTarget::RegistrationTarget(const SurfacePointSet& local_points, const Pose2d& pose)
    : points_(local_points.transformed(pose)), pose_(pose) {
  const std::vector<Eigen::Vector2d> means = points_.means();
  const double cell = points_.grid_resolution_m > 0.0 ? points_.grid_resolution_m : 1.0;
  index_ = PointGrid(means, cell);
}

std::vector<Correspondence> find_correspondences(const SurfacePointSet& scan,
                                                 std::span<const RegistrationTarget> keyframes,
                                                 const Pose2d& guess, double radius) {
  std::vector<Correspondence> out;
  const Eigen::Matrix2d rot = guess.rotation();
  SurfacePoint moved;
  for (std::size_t k = 0; k < keyframes.size(); ++k) {
    const std::vector<SurfacePoint>& targets = keyframes[k].points().points;
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
      moved = scan.points[i];
      moved.mean = guess * moved.mean;
      moved.normal = rot * moved.normal;
      const int j = keyframes[k].index().nearest(moved.mean, radius, [&](int idx) {
        return moved.normal.dot(targets[static_cast<std::size_t>(idx)].normal) > 0.0;
      });
      if (j < 0) continue;
      out.push_back({static_cast<int>(k), static_cast<int>(i), j,
                     residual_weight(moved, targets[static_cast<std::size_t>(j)])});
    }
  }
  return out;
}

double registration_cost(const SurfacePointSet& scan, std::span<const RegistrationTarget> keyframes,
                         std::span<const Correspondence> correspondences, const Pose2d& pose, double huber_delta,
                         Eigen::Vector3d* gradient) {
  const NormalEquations eq = linearize(scan, keyframes, correspondences, pose, huber_delta);
  // d/dx of w * L(|e|^2) is 2 * w * L' * J^T e.
  if (gradient) *gradient = 2.0 * eq.rhs;
  return eq.cost;
}

RegistrationResult register_scan(const SurfacePointSet& scan, std::span<const RegistrationTarget> keyframes,
                                 const Pose2d& guess, const RegistrationConfig& cfg) {
  if (scan.empty() || keyframes.empty()) {
    throw DegenerateRegistration("registration degenerate: empty scan or keyframe window");
  }
  const auto require_enough = [&cfg](std::size_t count) {
    if (static_cast<int>(count) < cfg.min_correspondences) {
      throw DegenerateRegistration(fmt::format("registration degenerate: {} correspondences (need {})", count,
                                               cfg.min_correspondences));
    }
  };

  RegistrationResult result;
  Eigen::Vector3d params = guess.vector();
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    result.iterations = iter;
    const Pose2d current(params);
    const std::vector<Correspondence> corr =
        find_correspondences(scan, keyframes, current, cfg.correspondence_radius_m);
    require_enough(corr.size());

    const NormalEquations eq = linearize(scan, keyframes, corr, current, cfg.huber_delta);
    Eigen::Vector3d step = -eq.hessian.ldlt().solve(eq.rhs);
    if (!step.allFinite()) break;

    bool decreased = false;
    for (int halving = 0; halving <= kMaxStepHalvings; ++halving) {
      const double cost = registration_cost(scan, keyframes, corr, Pose2d(params + step), cfg.huber_delta);
      if (cost <= eq.cost) {
        decreased = true;
        break;
      }
      step *= 0.5;
    }
    if (!decreased) {
      result.converged = step.norm() < cfg.convergence_tol;
      break;
    }
    params = Pose2d(params + step).vector();
    if (step.norm() < cfg.convergence_tol) {
      result.converged = true;
      break;
    }
  }

  result.pose = Pose2d(params);
  const std::vector<Correspondence> corr =
      find_correspondences(scan, keyframes, result.pose, cfg.correspondence_radius_m);
  require_enough(corr.size());
  result.correspondence_count = static_cast<int>(corr.size());
  result.final_cost = registration_cost(scan, keyframes, corr, result.pose, cfg.huber_delta);
  return result;
}

}  // namespace rodo
