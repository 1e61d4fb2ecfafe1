#pragma once

#include "rodo/geometry.hpp"
#include "rodo/sweep_io.hpp"
#include "rodo/trajectory.hpp"

#include <Eigen/Geometry>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

namespace rodo {

struct Landmark {
  Eigen::Vector2d position;
  double reflectivity = 255.0;  // [1, 255]
};

struct World {
  std::vector<Landmark> landmarks;
  Eigen::AlignedBox2d bounds;
};

/// Builds a world from landmarks, checking reflectivity and computing bounds.
World make_world(std::vector<Landmark> landmarks);

/// CSV with `x,y,reflectivity` lines; `#` comments and a non-numeric header line are skipped.
World load_world_csv(const std::filesystem::path& path);
void save_world_csv(const World& world, const std::filesystem::path& path);

struct SimConfig {
  int azimuth_count = 400;
  int range_bin_count = 1000;
  double range_resolution_m = 0.1;
  double sweep_duration_s = 0.25;
  double noise_std = 5.0;       // additive Gaussian, intensity units
  double speckle_prob = 0.01;   // per-bin probability of a uniform [0, 255] return
  std::uint64_t seed = 42;
};

using PoseFunction = std::function<Pose2d(double)>;

/// Renders one sweep. Each azimuth is captured at its own time offset from `center_time_s`, so
/// moving sensors produce motion-distorted sweeps. Landmarks deposit a Gaussian blob (one bin
/// sigma in range and azimuth); overlapping blobs combine by maximum. Output is quantized to
/// the 8-bit grid and deterministic for a given seed and center time.
PolarSweep render_sweep(const World& world, const PoseFunction& pose_at, double center_time_s,
                        const SimConfig& cfg);

/// Sweep with every bin replaced by uniform [0, 255] noise.
PolarSweep render_noise_sweep(double center_time_s, const SimConfig& cfg);

struct SimulatedSequence {
  std::vector<PolarSweep> sweeps;
  Trajectory ground_truth;  // sensor pose at each sweep center
};

using SweepSink = std::function<void(int index, const PolarSweep& sweep, const Pose2d& ground_truth)>;

/// Renders back-to-back sweeps starting at `start_time_s`, handing each to `sink` in order.
void stream_sequence(const World& world, const PoseFunction& pose_at, double start_time_s, int sweep_count,
                     const SimConfig& cfg, const SweepSink& sink);

/// Number of whole sweeps that fit in the time span of `dense_trajectory`.
int sweeps_in(const Trajectory& dense_trajectory, const SimConfig& cfg);

/// Back-to-back sweeps starting at `start_time_s`, kept in memory.
SimulatedSequence simulate_sequence(const World& world, const PoseFunction& pose_at, double start_time_s,
                                    int sweep_count, const SimConfig& cfg);

/// As above with poses interpolated from a dense trajectory; renders every sweep whose window
/// lies inside the trajectory's time span.
SimulatedSequence simulate_sequence(const World& world, const Trajectory& dense_trajectory, const SimConfig& cfg);

/// Writes `NNNNNN.rps` sweeps and `gt.tum` into `out_dir` (created if missing), one sweep in
/// memory at a time.
void generate_sequence(const World& world, const Trajectory& dense_trajectory, const SimConfig& cfg,
                       const std::filesystem::path& out_dir);

/// Rectangular wall loop with scattered short wall segments and a rounded drive path whose
/// curvature varies smoothly through each turn.
struct LoopScenario {
  double wall_half_x = 30.0;  // outer walls enclose 60 x 40 m (200 m perimeter)
  double wall_half_y = 20.0;
  double landmark_spacing = 0.2;
  double wall_reflectivity = 220.0;
  int clutter_segments = 70;
  double clutter_clearance = 3.0;  // min distance of clutter from the drive path
  /// Extra parallel landmark rows behind the +y wall, giving one side many more returns per cell.
  int dense_wall_rows = 0;
  double path_half_x = 20.0;
  double path_half_y = 10.0;
  double turn_length = 12.0;  // arc length of each quarter turn
  int sweep_count = 400;
  double sweep_duration_s = 0.25;
  std::uint64_t seed = 7;
};

World make_loop_world(const LoopScenario& scenario);
/// One lap of the drive path at constant speed, covering sweep_count sweeps.
PoseFunction loop_pose_function(const LoopScenario& scenario);
/// loop_pose_function sampled at `rate_hz` over the scenario duration.
Trajectory sample_trajectory(const PoseFunction& pose_at, double start_s, double end_s, double rate_hz);

}  // namespace rodo
