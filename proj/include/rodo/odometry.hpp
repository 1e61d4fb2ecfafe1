#pragma once

#include "rodo/geometry.hpp"
#include "rodo/motion.hpp"
#include "rodo/prefilter.hpp"
#include "rodo/registration.hpp"
#include "rodo/surface.hpp"
#include "rodo/sweep_io.hpp"
#include "rodo/trajectory.hpp"

#include <deque>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace rodo {

struct KeyframeConfig {
  double min_translation_m = 1.5;
  double min_rotation_rad = 5.0 * std::numbers::pi / 180.0;
  int window_size = 4;
};

struct OdometryConfig {
  FilterConfig filter;
  CompensationConfig motion;
  SurfaceConfig surface;
  RegistrationConfig registration;
  IcpConfig icp;
  KeyframeConfig keyframes;
  /// Lay the surface grid in the odometry frame (through the predicted pose) instead of the
  /// sensor frame, so consecutive scans share cell boundaries.
  bool odometry_frame_grid = true;
};

struct Keyframe {
  SurfacePointSet surface_points;  // in the keyframe's own sensor frame
  Pose2d pose;
  double timestamp_s = 0.0;
};

/// Sliding window of the most recent keyframes, oldest evicted first.
class KeyframeWindow {
 public:
  explicit KeyframeWindow(int capacity) : capacity_(capacity) {}

  void push(Keyframe keyframe);

  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  int capacity() const { return capacity_; }
  const Keyframe& newest() const { return frames_.back(); }
  const std::deque<Keyframe>& frames() const { return frames_; }
  /// Registration targets, parallel to frames().
  std::span<const RegistrationTarget> targets() const { return targets_; }

 private:
  int capacity_;
  std::deque<Keyframe> frames_;
  std::vector<RegistrationTarget> targets_;
};

/// True iff the motion from `last_keyframe` to `pose` exceeds either threshold.
bool should_create_keyframe(const Pose2d& last_keyframe, const Pose2d& pose, const KeyframeConfig& cfg);

struct SweepDiagnostics {
  double timestamp_s = 0.0;
  int filtered_points = 0;
  int surface_points = 0;
  int correspondence_count = 0;
  int registration_iterations = 0;
  double final_cost = 0.0;
  std::optional<double> icp_fitness;  // unset when ICP did not run
  bool icp_accepted = false;
  bool keyframe_created = false;
  bool fallback = false;  // registration degenerate, constant-velocity prediction used
  Pose2d registration_pose;
};

struct SweepEstimate {
  Pose2d pose;
  SweepDiagnostics diagnostics;
};

/// Incremental scan-to-keyframe-window radar odometry. Single owner; sweeps must arrive in
/// strictly increasing time order.
class RadarOdometry {
 public:
  explicit RadarOdometry(OdometryConfig cfg);

  SweepEstimate process_sweep(const PolarSweep& sweep);

  const OdometryConfig& config() const { return cfg_; }
  const KeyframeWindow& window() const { return window_; }
  const Velocity2d& velocity() const { return velocity_; }
  const Trajectory& trajectory() const { return trajectory_; }
  int keyframes_created() const { return keyframes_created_; }

 private:
  SurfacePointSet build_scan_surface(const PointCloud2D& cloud, const Pose2d& prediction) const;

  OdometryConfig cfg_;
  KeyframeWindow window_;
  Velocity2d velocity_;
  Trajectory trajectory_;
  std::vector<Eigen::Vector2d> previous_means_;
  int keyframes_created_ = 0;
};

/// Header and row formatting for the per-sweep diagnostics CSV.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const SweepDiagnostics& d);

}  // namespace rodo
