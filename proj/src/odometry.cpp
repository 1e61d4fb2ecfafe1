#include "rodo/odometry.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace rodo {

void KeyframeWindow::push(Keyframe keyframe) {
  if (!frames_.empty() && !(keyframe.timestamp_s > frames_.back().timestamp_s)) {
    throw std::invalid_argument("keyframe timestamps must increase");
  }
  targets_.emplace_back(keyframe.surface_points, keyframe.pose);
  frames_.push_back(std::move(keyframe));
  while (static_cast<int>(frames_.size()) > capacity_) {
    frames_.pop_front();
    targets_.erase(targets_.begin());
  }
}

bool should_create_keyframe(const Pose2d& last_keyframe, const Pose2d& pose, const KeyframeConfig& cfg) {
  const Pose2d delta = pose.relative_to(last_keyframe);
  return delta.translation().norm() > cfg.min_translation_m || std::abs(delta.theta()) > cfg.min_rotation_rad;
}

RadarOdometry::RadarOdometry(OdometryConfig cfg) : cfg_(std::move(cfg)), window_(cfg_.keyframes.window_size) {
  if (cfg_.keyframes.window_size < 1) throw std::invalid_argument("keyframe window size must be >= 1");
}

SurfacePointSet RadarOdometry::build_scan_surface(const PointCloud2D& cloud, const Pose2d& prediction) const {
  if (!cfg_.odometry_frame_grid) return build_surface_points(cloud, cfg_.surface, cfg_.filter.z_min);
  PointCloud2D moved = cloud;
  for (RadarPoint& p : moved) p.position = prediction * p.position;
  return build_surface_points(moved, cfg_.surface, cfg_.filter.z_min, prediction.translation())
      .transformed(prediction.inverse());
}

SweepEstimate RadarOdometry::process_sweep(const PolarSweep& sweep) {
  const double t = sweep.sweep_center_time_s;
  if (!trajectory_.empty() && !(t > trajectory_.poses.back().timestamp_s)) {
    throw std::invalid_argument("sweeps must arrive in strictly increasing time order");
  }

  SweepEstimate out;
  SweepDiagnostics& diag = out.diagnostics;
  diag.timestamp_s = t;

  PointCloud2D cloud = k_strongest_filter(sweep, cfg_.filter);
  diag.filtered_points = static_cast<int>(cloud.size());
  if (cfg_.motion.enabled) {
    cloud = compensate(cloud, velocity_, sweep.sweep_duration_s, sweep.azimuth_count());
  }
  const Pose2d prediction = trajectory_.empty()
                                ? Pose2d::Identity()
                                : trajectory_.poses.back().pose * velocity_.displacement(t - trajectory_.poses.back().timestamp_s);
  const SurfacePointSet surface = build_scan_surface(cloud, prediction);
  diag.surface_points = static_cast<int>(surface.size());

  if (trajectory_.empty()) {
    out.pose = Pose2d::Identity();
    diag.registration_pose = out.pose;
    window_.push({surface, out.pose, t});
    ++keyframes_created_;
    diag.keyframe_created = true;
    trajectory_.push_back(t, out.pose);
    previous_means_ = surface.means();
    return out;
  }

  const StampedPose& previous = trajectory_.poses.back();
  const double dt = t - previous.timestamp_s;

  Pose2d pose = prediction;
  try {
    const RegistrationResult reg = register_scan(surface, window_.targets(), prediction, cfg_.registration);
    pose = reg.pose;
    diag.correspondence_count = reg.correspondence_count;
    diag.registration_iterations = reg.iterations;
    diag.final_cost = reg.final_cost;
  } catch (const DegenerateRegistration&) {
    diag.fallback = true;
  }
  diag.registration_pose = pose;

  // Re-grid at the registered pose so consecutive scans share cell boundaries in the odometry frame.
  SurfacePointSet settled = cfg_.odometry_frame_grid ? build_scan_surface(cloud, pose) : surface;
  if (cfg_.icp.enabled) {
    const Pose2d relative = pose.relative_to(previous.pose);
    const IcpResult icp = icp_refine(settled.means(), previous_means_, relative, cfg_.icp);
    diag.icp_fitness = icp.fitness;
    diag.icp_accepted = icp.accepted;
    if (icp.accepted) {
      pose = previous.pose * icp.pose;
      if (cfg_.odometry_frame_grid) settled = build_scan_surface(cloud, pose);
    }
  }

  velocity_ = Velocity2d::from_displacement(pose.relative_to(previous.pose), dt);

  if (should_create_keyframe(window_.newest().pose, pose, cfg_.keyframes)) {
    window_.push({settled, pose, t});
    ++keyframes_created_;
    diag.keyframe_created = true;
  }

  trajectory_.push_back(t, pose);
  previous_means_ = settled.means();
  out.pose = pose;
  return out;
}

std::string diagnostics_csv_header() {
  return "timestamp,filtered_points,surface_points,correspondences,iterations,final_cost,icp_fitness,"
         "icp_accepted,keyframe,fallback\n";
}

std::string diagnostics_csv_row(const SweepDiagnostics& d) {
  const std::string fitness = d.icp_fitness ? fmt::format("{:.9g}", *d.icp_fitness) : std::string();
  return fmt::format("{:.9g},{},{},{},{},{:.9g},{},{},{},{}\n", d.timestamp_s, d.filtered_points, d.surface_points,
                     d.correspondence_count, d.registration_iterations, d.final_cost, fitness,
                     d.icp_accepted ? 1 : 0, d.keyframe_created ? 1 : 0, d.fallback ? 1 : 0);
}

}  // namespace rodo
