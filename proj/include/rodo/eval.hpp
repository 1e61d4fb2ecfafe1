#pragma once

#include "rodo/trajectory.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace rodo {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimate/ground-truth pairs matched by nearest timestamp.
struct PoseAssociation {
  std::vector<double> timestamps;
  std::vector<Pose2d> estimate;
  std::vector<Pose2d> ground_truth;
  int unmatched = 0;  // estimate poses with no ground truth within tolerance

  std::size_t size() const { return estimate.size(); }
};

PoseAssociation associate(const Trajectory& estimate, const Trajectory& ground_truth,
                          double tolerance_s = 0.05);

/// KITTI segment lengths 100, 200, ..., 800 m.
std::vector<double> kitti_segment_lengths();

struct SegmentError {
  std::size_t first = 0;
  std::size_t last = 0;
  double length_m = 0.0;
  double translation_error_m = 0.0;
  double rotation_error_rad = 0.0;
};

struct KittiErrors {
  double translation_percent = 0.0;
  double deg_per_100m = 0.0;
  std::vector<SegmentError> segments;
};

/// For every start index and every length L, the segment ends at the first pose whose
/// ground-truth path distance from the start reaches L. Errors are normalized by L and averaged
/// over all segments. Throws EvalError("trajectory too short") if no segment fits.
KittiErrors kitti_errors(std::span<const Pose2d> estimate, std::span<const Pose2d> ground_truth,
                         std::span<const double> segment_lengths_m);
KittiErrors kitti_errors(const Trajectory& estimate, const Trajectory& ground_truth,
                         std::span<const double> segment_lengths_m);

/// RMS translational relative pose error over frame gaps of `delta_frames`, in centimeters.
double rpe_cm(std::span<const Pose2d> estimate, std::span<const Pose2d> ground_truth, int delta_frames = 1);
double rpe_cm(const Trajectory& estimate, const Trajectory& ground_truth, int delta_frames = 1);

/// Position RMSE after the least-squares rigid alignment of the estimate onto ground truth, in meters.
double ate_m(std::span<const Pose2d> estimate, std::span<const Pose2d> ground_truth);
double ate_m(const Trajectory& estimate, const Trajectory& ground_truth);

/// The rigid transform used by ate_m.
Pose2d align_trajectory(std::span<const Pose2d> estimate, std::span<const Pose2d> ground_truth);

}  // namespace rodo
