#pragma once

#include "rodo/geometry.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rodo {

struct StampedPose {
  double timestamp_s = 0.0;
  Pose2d pose;
};

/// Timestamped pose sequence; timestamps strictly increasing.
struct Trajectory {
  std::vector<StampedPose> poses;

  bool empty() const { return poses.empty(); }
  std::size_t size() const { return poses.size(); }
  void push_back(double timestamp_s, const Pose2d& pose) { poses.push_back({timestamp_s, pose}); }
};

class TrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws TrajectoryError unless timestamps are strictly increasing.
void validate_trajectory(const Trajectory& trajectory);

/// `timestamp x y 0 0 0 sin(theta/2) cos(theta/2)`, 9 significant digits.
std::string format_tum_line(const StampedPose& pose);

/// Reads TUM lines (`#` comments and blank lines skipped); yaw is extracted from the quaternion.
Trajectory read_tum(const std::filesystem::path& path);
void write_tum(const Trajectory& trajectory, const std::filesystem::path& path);

/// Pose at time t by linear interpolation of translation and shortest-arc heading. Clamps
/// outside the covered interval.
Pose2d interpolate_pose(const Trajectory& trajectory, double t);

}  // namespace rodo
