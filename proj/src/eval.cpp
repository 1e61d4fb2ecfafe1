#include "rodo/eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rodo {

namespace {

void require_same_size(std::span<const Pose2d> a, std::span<const Pose2d> b) {
  if (a.size() != b.size()) throw EvalError("estimate and ground truth differ in length");
}

PoseAssociation associate_or_throw(const Trajectory& estimate, const Trajectory& ground_truth,
                                   std::size_t min_pairs) {
  PoseAssociation assoc = associate(estimate, ground_truth);
  if (assoc.size() < min_pairs) {
    throw EvalError(fmt::format("only {} pose pairs associated within tolerance (need {})", assoc.size(), min_pairs));
  }
  return assoc;
}

}  // namespace

PoseAssociation associate(const Trajectory& estimate, const Trajectory& ground_truth, double tolerance_s) {
  PoseAssociation assoc;
  const auto& gt = ground_truth.poses;
  for (const StampedPose& est : estimate.poses) {
    const auto upper = std::lower_bound(gt.begin(), gt.end(), est.timestamp_s,
                                        [](const StampedPose& p, double t) { return p.timestamp_s < t; });
    auto best = gt.end();
    double best_gap = std::numeric_limits<double>::infinity();
    if (upper != gt.end()) {
      best = upper;
      best_gap = upper->timestamp_s - est.timestamp_s;
    }
    if (upper != gt.begin() && est.timestamp_s - (upper - 1)->timestamp_s <= best_gap) {
      best = upper - 1;
      best_gap = est.timestamp_s - best->timestamp_s;
    }
    if (best != gt.end() && best_gap > tolerance_s) best = gt.end();
    if (best == gt.end()) {
      ++assoc.unmatched;
      continue;
    }
    assoc.timestamps.push_back(est.timestamp_s);
    assoc.estimate.push_back(est.pose);
    assoc.ground_truth.push_back(best->pose);
  }
  return assoc;
}

std::vector<double> kitti_segment_lengths() {
  std::vector<double> lengths;
  for (int l = 100; l <= 800; l += 100) lengths.push_back(l);
  return lengths;
}

KittiErrors kitti_errors(std::span<const Pose2d> estimate, std::span<const Pose2d> ground_truth,
                         std::span<const double> segment_lengths_m) {
  require_same_size(estimate, ground_truth);
  const std::size_t n = ground_truth.size();
  std::vector<double> distance(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    distance[i] = distance[i - 1] + (ground_truth[i].translation() - ground_truth[i - 1].translation()).norm();
  }

  KittiErrors out;
  for (std::size_t first = 0; first < n; ++first) {
    for (const double length : segment_lengths_m) {
      const auto end = std::lower_bound(distance.begin() + static_cast<std::ptrdiff_t>(first), distance.end(),
                                        distance[first] + length);
      if (end == distance.end()) continue;
      const auto last = static_cast<std::size_t>(end - distance.begin());
      if (last == first) continue;
      const Pose2d gt_delta = ground_truth[last].relative_to(ground_truth[first]);
      const Pose2d est_delta = estimate[last].relative_to(estimate[first]);
      const Pose2d error = gt_delta.relative_to(est_delta);
      out.segments.push_back({first, last, length, error.translation().norm(), std::abs(error.theta())});
    }
  }
  if (out.segments.empty()) throw EvalError("trajectory too short");

  double t_sum = 0.0;
  double r_sum = 0.0;
  for (const SegmentError& s : out.segments) {
    t_sum += s.translation_error_m / s.length_m;
    r_sum += s.rotation_error_rad / s.length_m;
  }
  const auto count = static_cast<double>(out.segments.size());
  out.translation_percent = 100.0 * t_sum / count;
  out.deg_per_100m = 100.0 * (180.0 / std::numbers::pi) * r_sum / count;
  return out;
}

KittiErrors kitti_errors(const Trajectory& estimate, const Trajectory& ground_truth,
                         std::span<const double> segment_lengths_m) {
  const PoseAssociation assoc = associate_or_throw(estimate, ground_truth, 2);
  return kitti_errors(assoc.estimate, assoc.ground_truth, segment_lengths_m);
}

double rpe_cm(std::span<const Pose2d> estimate, std::span<const Pose2d> ground_truth, int delta_frames) {
  require_same_size(estimate, ground_truth);
  if (delta_frames < 1) throw EvalError("RPE frame delta must be at least 1");
  const auto delta = static_cast<std::size_t>(delta_frames);
  if (estimate.size() < delta + 1) throw EvalError("too few poses for the requested RPE delta");
  double sum = 0.0;
  const std::size_t terms = estimate.size() - delta;
  for (std::size_t i = 0; i < terms; ++i) {
    const Pose2d gt_delta = ground_truth[i + delta].relative_to(ground_truth[i]);
    const Pose2d est_delta = estimate[i + delta].relative_to(estimate[i]);
    sum += est_delta.relative_to(gt_delta).translation().squaredNorm();
  }
  return 100.0 * std::sqrt(sum / static_cast<double>(terms));
}

double rpe_cm(const Trajectory& estimate, const Trajectory& ground_truth, int delta_frames) {
  const PoseAssociation assoc =
      associate_or_throw(estimate, ground_truth, static_cast<std::size_t>(std::max(delta_frames, 1)) + 1);
  return rpe_cm(assoc.estimate, assoc.ground_truth, delta_frames);
}

Pose2d align_trajectory(std::span<const Pose2d> estimate, std::span<const Pose2d> ground_truth) {
  require_same_size(estimate, ground_truth);
  if (estimate.size() < 2) throw EvalError("ATE needs at least 2 pose pairs");
  std::vector<Eigen::Vector2d> src;
  std::vector<Eigen::Vector2d> dst;
  src.reserve(estimate.size());
  dst.reserve(estimate.size());
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    src.push_back(estimate[i].translation());
    dst.push_back(ground_truth[i].translation());
  }
  return fit_rigid_transform<double>(src, dst);
}

double ate_m(std::span<const Pose2d> estimate, std::span<const Pose2d> ground_truth) {
  const Pose2d alignment = align_trajectory(estimate, ground_truth);
  double sum = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    sum += (ground_truth[i].translation() - alignment * estimate[i].translation()).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(estimate.size()));
}

double ate_m(const Trajectory& estimate, const Trajectory& ground_truth) {
  const PoseAssociation assoc = associate_or_throw(estimate, ground_truth, 2);
  return ate_m(assoc.estimate, assoc.ground_truth);
}

}  // namespace rodo
