#include "rodo/registration.hpp"

#include <limits>

namespace rodo {

namespace {

constexpr double kIcpStepTolerance = 1e-10;

struct Matches {
  std::vector<Eigen::Vector2d> source;
  std::vector<Eigen::Vector2d> target;
  double squared_error = 0.0;
};

Matches match(std::span<const Eigen::Vector2d> current, const PointGrid& previous, const Pose2d& pose,
              double max_dist) {
  Matches m;
  for (const Eigen::Vector2d& p : current) {
    const Eigen::Vector2d q = pose * p;
    const int j = previous.nearest(q, max_dist);
    if (j < 0) continue;
    const Eigen::Vector2d& t = previous.points()[static_cast<std::size_t>(j)];
    m.source.push_back(p);
    m.target.push_back(t);
    m.squared_error += (t - q).squaredNorm();
  }
  return m;
}

}  // namespace

IcpResult icp_refine(std::span<const Eigen::Vector2d> current, std::span<const Eigen::Vector2d> previous,
                     const Pose2d& initial, const IcpConfig& cfg) {
  IcpResult result;
  result.pose = initial;
  result.fitness = std::numeric_limits<double>::infinity();
  if (current.empty() || previous.empty()) return result;

  const PointGrid grid(previous, cfg.max_corr_dist);
  Pose2d pose = initial;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const Matches m = match(current, grid, pose, cfg.max_corr_dist);
    if (m.source.empty()) break;
    const Pose2d next = fit_rigid_transform<double>(m.source, m.target);
    const double change = (next.translation() - pose.translation()).norm() +
                          std::abs(normalize_angle(next.theta() - pose.theta()));
    pose = next;
    if (change < kIcpStepTolerance) break;
  }

  const Matches final_matches = match(current, grid, pose, cfg.max_corr_dist);
  result.inliers = static_cast<int>(final_matches.source.size());
  if (result.inliers > 0) result.fitness = final_matches.squared_error / result.inliers;
  result.accepted = result.inliers >= cfg.min_correspondences && result.fitness < cfg.fitness_threshold;
  if (result.accepted) result.pose = pose;
  return result;
}

}  // namespace rodo
