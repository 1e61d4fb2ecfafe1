#pragma once

#include "rodo/geometry.hpp"
#include "rodo/point_grid.hpp"
#include "rodo/surface.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace rodo {

/// Huber loss applied to a squared residual s: s inside delta^2, 2*delta*sqrt(s) - delta^2 outside.
template <typename Scalar>
Scalar huber_loss(Scalar residual_sq, Scalar delta) {
  const Scalar delta_sq = delta * delta;
  if (residual_sq <= delta_sq) return residual_sq;
  return Scalar(2) * delta * std::sqrt(residual_sq) - delta_sq;
}

/// d huber_loss / d residual_sq.
template <typename Scalar>
Scalar huber_derivative(Scalar residual_sq, Scalar delta) {
  if (residual_sq <= delta * delta) return Scalar(1);
  return delta / std::sqrt(residual_sq);
}

/// 2 min(a, b) / (a + b), and 1 when both are zero.
template <typename Scalar>
Scalar similarity(Scalar a, Scalar b) {
  const Scalar sum = a + b;
  if (sum == Scalar(0)) return Scalar(1);
  return Scalar(2) * std::min(a, b) / sum;
}

/// Planarity similarity + detection-count similarity + clamped normal agreement, in [0, 3].
/// Both normals must already be expressed in the same frame.
double residual_weight(const SurfacePoint& source, const SurfacePoint& target);

struct Correspondence {
  int keyframe_index = 0;
  int source_index = 0;
  int target_index = 0;
  double weight = 0.0;
};

struct RegistrationConfig {
  double correspondence_radius_m = 3.5;
  double huber_delta = 0.1;  // residual norm (m) where the loss turns linear
  int max_iterations = 30;
  double convergence_tol = 1e-6;  // norm of the (x, y, theta) step
  int min_correspondences = 10;
};

struct RegistrationResult {
  Pose2d pose;
  double final_cost = 0.0;
  int iterations = 0;
  int correspondence_count = 0;
  bool converged = false;
};

class DegenerateRegistration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Keyframe surface points expressed in the odometry frame, indexed for radius search.
class RegistrationTarget {
 public:
  RegistrationTarget(const SurfacePointSet& local_points, const Pose2d& pose);

  const SurfacePointSet& points() const { return points_; }
  const Pose2d& pose() const { return pose_; }
  const PointGrid& index() const { return index_; }

 private:
  SurfacePointSet points_;
  Pose2d pose_;
  PointGrid index_;
};

/// For every scan point mapped through `guess` and every keyframe, the nearest keyframe point
/// within `radius` whose normal agrees (positive dot product) with the rotated scan normal.
std::vector<Correspondence> find_correspondences(const SurfacePointSet& scan,
                                                 std::span<const RegistrationTarget> keyframes,
                                                 const Pose2d& guess, double radius);

/// Robust point-to-point cost sum w * L(|mu_k - (R mu_s + t)|^2) for fixed correspondences.
/// Optionally returns the gradient with respect to (x, y, theta).
double registration_cost(const SurfacePointSet& scan, std::span<const RegistrationTarget> keyframes,
                         std::span<const Correspondence> correspondences, const Pose2d& pose, double huber_delta,
                         Eigen::Vector3d* gradient = nullptr);

/// Gauss-Newton (IRLS) minimization of registration_cost over the scan pose, re-finding
/// correspondences each iteration. Throws DegenerateRegistration when fewer than
/// cfg.min_correspondences are found.
RegistrationResult register_scan(const SurfacePointSet& scan, std::span<const RegistrationTarget> keyframes,
                                 const Pose2d& guess, const RegistrationConfig& cfg);

struct IcpConfig {
  bool enabled = true;
  double fitness_threshold = 1.0;
  double max_corr_dist = 2.0;
  int max_iterations = 30;
  int min_correspondences = 10;
};

struct IcpResult {
  Pose2d pose;
  double fitness = 0.0;  // mean squared distance over final inliers
  int inliers = 0;
  bool accepted = false;
};

/// Point-to-point ICP of `current` onto `previous` starting at `initial` (maps current into the
/// previous frame). When not accepted the returned pose is `initial`, unchanged.
IcpResult icp_refine(std::span<const Eigen::Vector2d> current, std::span<const Eigen::Vector2d> previous,
                     const Pose2d& initial, const IcpConfig& cfg);

}  // namespace rodo
