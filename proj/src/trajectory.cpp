#include "rodo/trajectory.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <locale>
#include <sstream>

namespace rodo {

void validate_trajectory(const Trajectory& trajectory) {
  for (std::size_t i = 1; i < trajectory.poses.size(); ++i) {
    if (!(trajectory.poses[i].timestamp_s > trajectory.poses[i - 1].timestamp_s)) {
      throw TrajectoryError(fmt::format("timestamps not strictly increasing at line {}", i + 1));
    }
  }
}

std::string format_tum_line(const StampedPose& p) {
  const double half = 0.5 * p.pose.theta();
  return fmt::format("{:.9g} {:.9g} {:.9g} 0 0 0 {:.9g} {:.9g}\n", p.timestamp_s, p.pose.x(), p.pose.y(),
                     std::sin(half), std::cos(half));
}

Trajectory read_tum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TrajectoryError(fmt::format("cannot open {}", path.string()));
  Trajectory trajectory;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    double t, x, y, z, qx, qy, qz, qw;
    if (!(fields >> t >> x >> y >> z >> qx >> qy >> qz >> qw)) {
      throw TrajectoryError(fmt::format("{}:{}: expected 8 numeric fields", path.string(), line_no));
    }
    const double yaw = std::atan2(2.0 * (qw * qz + qx * qy), 1.0 - 2.0 * (qy * qy + qz * qz));
    trajectory.push_back(t, Pose2d(x, y, yaw));
  }
  validate_trajectory(trajectory);
  return trajectory;
}

void write_tum(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw TrajectoryError(fmt::format("cannot open {} for writing", path.string()));
  for (const StampedPose& p : trajectory.poses) out << format_tum_line(p);
  if (!out) throw TrajectoryError(fmt::format("failed writing {}", path.string()));
}

Pose2d interpolate_pose(const Trajectory& trajectory, double t) {
  if (trajectory.empty()) throw TrajectoryError("cannot interpolate an empty trajectory");
  const auto& poses = trajectory.poses;
  if (t <= poses.front().timestamp_s) return poses.front().pose;
  if (t >= poses.back().timestamp_s) return poses.back().pose;
  const auto upper = std::upper_bound(poses.begin(), poses.end(), t,
                                      [](double value, const StampedPose& p) { return value < p.timestamp_s; });
  const StampedPose& b = *upper;
  const StampedPose& a = *(upper - 1);
  const double alpha = (t - a.timestamp_s) / (b.timestamp_s - a.timestamp_s);
  const Eigen::Vector2d translation = (1.0 - alpha) * a.pose.translation() + alpha * b.pose.translation();
  const double dtheta = normalize_angle(b.pose.theta() - a.pose.theta());
  return Pose2d(translation, a.pose.theta() + alpha * dtheta);
}

}  // namespace rodo
