#include "rodo/sim.hpp"

#include "rodo/motion.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rodo {

namespace {

constexpr double kBlobSigmaBins = 1.0;
constexpr int kBlobHalfWidth = 4;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 sweep_rng(const SimConfig& cfg, double center_time_s, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(cfg.seed ^ splitmix64(std::bit_cast<std::uint64_t>(center_time_s) + stream)));
}

void add_noise(PolarSweep::Intensities& image, const SimConfig& cfg, double center_time_s) {
  std::mt19937_64 rng = sweep_rng(cfg, center_time_s, 0);
  std::normal_distribution<double> gaussian(0.0, cfg.noise_std > 0.0 ? cfg.noise_std : 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double* data = image.data();
  const Eigen::Index n = image.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = data[i];
    if (cfg.noise_std > 0.0) v += gaussian(rng);
    if (cfg.speckle_prob > 0.0 && unit(rng) < cfg.speckle_prob) v = 255.0 * unit(rng);
    data[i] = v;
  }
}

void append_segment(std::vector<Landmark>& out, const Eigen::Vector2d& a, const Eigen::Vector2d& b, double spacing,
                    double reflectivity) {
  const double length = (b - a).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(length / spacing)));
  for (int i = 0; i <= steps; ++i) {
    out.push_back({a + (b - a) * (static_cast<double>(i) / steps), reflectivity});
  }
}

/// Closed loop of four straights joined by left turns of a quarter circle each. Curvature inside a
/// turn follows a sin^2 profile, so heading rate changes smoothly like a steered vehicle.
class LoopPath {
 public:
  LoopPath(double half_x, double half_y, double turn_length) : turn_length_(turn_length) {
    constexpr int kSteps = 4000;
    const double du = turn_length / kSteps;
    turn_offsets_.resize(kSteps + 1);
    turn_offsets_[0].setZero();
    Eigen::Vector2d prev_dir(1.0, 0.0);
    for (int i = 1; i <= kSteps; ++i) {
      const double h = turn_heading(i * du);
      const Eigen::Vector2d dir(std::cos(h), std::sin(h));
      turn_offsets_[static_cast<std::size_t>(i)] = turn_offsets_[static_cast<std::size_t>(i - 1)] + 0.5 * du * (prev_dir + dir);
      prev_dir = dir;
    }
    const double reach = turn_offsets_.back().x();
    straights_ = {2.0 * (half_x - reach), 2.0 * (half_y - reach), 2.0 * (half_x - reach), 2.0 * (half_y - reach)};
    if (straights_[0] <= 0.0 || straights_[1] <= 0.0) {
      throw std::invalid_argument("loop path turns do not fit inside the requested half sizes");
    }
    starts_ = {Eigen::Vector2d(-0.5 * straights_[0], -half_y), Eigen::Vector2d(half_x, -0.5 * straights_[1]),
               Eigen::Vector2d(0.5 * straights_[0], half_y), Eigen::Vector2d(-half_x, 0.5 * straights_[1])};
    length_ = 2.0 * (straights_[0] + straights_[1]) + 4.0 * turn_length_;
    for (double s = 0.0; s < length_; s += 0.1) samples_.push_back(at(s).translation());
  }

  double length() const { return length_; }

  /// Pose at arc length s, starting mid bottom straight heading +x, counter-clockwise.
  Pose2d at(double s) const {
    s = std::fmod(s, length_);
    if (s < 0) s += length_;
    double rem = s + 0.5 * straights_[0];
    for (int side = 0;; side = (side + 1) % 4) {
      const double heading = side * 0.5 * std::numbers::pi;
      const Eigen::Matrix2d rot = rotation2(heading);
      const double straight = straights_[static_cast<std::size_t>(side)];
      if (rem <= straight) return Pose2d(starts_[static_cast<std::size_t>(side)] + rem * rot.col(0), heading);
      rem -= straight;
      if (rem <= turn_length_) {
        const Eigen::Vector2d corner = starts_[static_cast<std::size_t>(side)] + straight * rot.col(0);
        return Pose2d(corner + rot * turn_offset(rem), heading + turn_heading(rem));
      }
      rem -= turn_length_;
    }
  }

  double distance_to(const Eigen::Vector2d& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Eigen::Vector2d& q : samples_) best = std::min(best, (q - p).squaredNorm());
    return std::sqrt(best);
  }

 private:
  double turn_heading(double u) const {
    const double f = u / turn_length_;
    return 0.5 * std::numbers::pi * (f - std::sin(2.0 * std::numbers::pi * f) / (2.0 * std::numbers::pi));
  }

  Eigen::Vector2d turn_offset(double u) const {
    const double x = std::clamp(u / turn_length_, 0.0, 1.0) * static_cast<double>(turn_offsets_.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(x), turn_offsets_.size() - 2);
    const double f = x - static_cast<double>(i);
    return (1.0 - f) * turn_offsets_[i] + f * turn_offsets_[i + 1];
  }

  double turn_length_;
  double length_ = 0.0;
  std::vector<Eigen::Vector2d> turn_offsets_;
  std::array<double, 4> straights_{};
  std::array<Eigen::Vector2d, 4> starts_;
  std::vector<Eigen::Vector2d> samples_;
};

}  // namespace

World make_world(std::vector<Landmark> landmarks) {
  World world;
  for (const Landmark& l : landmarks) {
    if (!(l.reflectivity >= 1.0 && l.reflectivity <= 255.0)) {
      throw std::invalid_argument(fmt::format("landmark reflectivity {} outside [1, 255]", l.reflectivity));
    }
    world.bounds.extend(l.position);
  }
  world.landmarks = std::move(landmarks);
  return world;
}

World load_world_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open world file {}", path.string()));
  std::vector<Landmark> landmarks;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    double x, y, r;
    if (!(fields >> x >> y >> r)) {
      if (landmarks.empty() && line_no == 1) continue;  // header
      throw std::runtime_error(fmt::format("{}:{}: expected x,y,reflectivity", path.string(), line_no));
    }
    landmarks.push_back({Eigen::Vector2d(x, y), r});
  }
  return make_world(std::move(landmarks));
}

void save_world_csv(const World& world, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  out << "x,y,reflectivity\n";
  for (const Landmark& l : world.landmarks) {
    out << fmt::format("{},{},{}\n", l.position.x(), l.position.y(), l.reflectivity);
  }
}

PolarSweep render_sweep(const World& world, const PoseFunction& pose_at, double center_time_s,
                        const SimConfig& cfg) {
  const int azimuths = cfg.azimuth_count;
  const int bins = cfg.range_bin_count;
  const double bins_per_radian = azimuths / (2.0 * std::numbers::pi);
  const double max_range = bins * cfg.range_resolution_m;

  std::vector<Pose2d> sensor_inverse(static_cast<std::size_t>(azimuths));
  for (int a = 0; a < azimuths; ++a) {
    const double dt = azimuth_time_offset(a, azimuths, cfg.sweep_duration_s);
    sensor_inverse[static_cast<std::size_t>(a)] = pose_at(center_time_s + dt).inverse();
  }
  const Pose2d center_inverse = pose_at(center_time_s).inverse();

  PolarSweep::Intensities image = PolarSweep::Intensities::Zero(azimuths, bins);
  for (const Landmark& landmark : world.landmarks) {
    const Eigen::Vector2d approx = center_inverse * landmark.position;
    if (approx.norm() > max_range + 2.0 * cfg.range_resolution_m * kBlobHalfWidth) continue;
    const double approx_az = std::atan2(approx.y(), approx.x()) * bins_per_radian;
    // Sensor motion within a sweep shifts the bearing only slightly, so a small window suffices.
    const int lo = static_cast<int>(std::floor(approx_az)) - kBlobHalfWidth - 2;
    const int hi = static_cast<int>(std::ceil(approx_az)) + kBlobHalfWidth + 2;
    for (int a_raw = lo; a_raw <= hi; ++a_raw) {
      const int a = ((a_raw % azimuths) + azimuths) % azimuths;
      const Eigen::Vector2d local = sensor_inverse[static_cast<std::size_t>(a)] * landmark.position;
      const double range = local.norm();
      if (range > max_range) continue;
      double az_offset = a - std::atan2(local.y(), local.x()) * bins_per_radian;
      az_offset = std::remainder(az_offset, static_cast<double>(azimuths));
      if (std::abs(az_offset) > kBlobHalfWidth) continue;
      const double az_gain = std::exp(-0.5 * az_offset * az_offset / (kBlobSigmaBins * kBlobSigmaBins));
      const double range_bin = range / cfg.range_resolution_m;
      const int center_bin = static_cast<int>(std::lround(range_bin));
      for (int d = std::max(center_bin - kBlobHalfWidth, 0); d <= std::min(center_bin + kBlobHalfWidth, bins - 1); ++d) {
        const double off = d - range_bin;
        const double value =
            landmark.reflectivity * az_gain * std::exp(-0.5 * off * off / (kBlobSigmaBins * kBlobSigmaBins));
        double& cell = image(a, d);
        cell = std::max(cell, value);
      }
    }
  }

  add_noise(image, cfg, center_time_s);
  return quantize_sweep(make_sweep(image.cwiseMax(0.0), cfg.range_resolution_m, center_time_s, cfg.sweep_duration_s));
}

PolarSweep render_noise_sweep(double center_time_s, const SimConfig& cfg) {
  std::mt19937_64 rng = sweep_rng(cfg, center_time_s, 1);
  std::uniform_real_distribution<double> uniform(0.0, 255.0);
  PolarSweep::Intensities image(cfg.azimuth_count, cfg.range_bin_count);
  for (Eigen::Index i = 0; i < image.size(); ++i) image.data()[i] = uniform(rng);
  return quantize_sweep(make_sweep(std::move(image), cfg.range_resolution_m, center_time_s, cfg.sweep_duration_s));
}

void stream_sequence(const World& world, const PoseFunction& pose_at, double start_time_s, int sweep_count,
                     const SimConfig& cfg, const SweepSink& sink) {
  for (int i = 0; i < sweep_count; ++i) {
    const double center = start_time_s + (i + 0.5) * cfg.sweep_duration_s;
    sink(i, render_sweep(world, pose_at, center, cfg), pose_at(center));
  }
}

int sweeps_in(const Trajectory& dense_trajectory, const SimConfig& cfg) {
  if (dense_trajectory.size() < 2) throw std::invalid_argument("dense trajectory needs at least two poses");
  validate_trajectory(dense_trajectory);
  const double span = dense_trajectory.poses.back().timestamp_s - dense_trajectory.poses.front().timestamp_s;
  return static_cast<int>(std::floor(span / cfg.sweep_duration_s + 1e-9));
}

SimulatedSequence simulate_sequence(const World& world, const PoseFunction& pose_at, double start_time_s,
                                    int sweep_count, const SimConfig& cfg) {
  SimulatedSequence seq;
  stream_sequence(world, pose_at, start_time_s, sweep_count, cfg,
                  [&seq](int, const PolarSweep& sweep, const Pose2d& gt) {
                    seq.sweeps.push_back(sweep);
                    seq.ground_truth.push_back(sweep.sweep_center_time_s, gt);
                  });
  return seq;
}

SimulatedSequence simulate_sequence(const World& world, const Trajectory& dense_trajectory, const SimConfig& cfg) {
  const int count = sweeps_in(dense_trajectory, cfg);
  return simulate_sequence(
      world, [&dense_trajectory](double t) { return interpolate_pose(dense_trajectory, t); },
      dense_trajectory.poses.front().timestamp_s, count, cfg);
}

void generate_sequence(const World& world, const Trajectory& dense_trajectory, const SimConfig& cfg,
                       const std::filesystem::path& out_dir) {
  const int count = sweeps_in(dense_trajectory, cfg);
  std::filesystem::create_directories(out_dir);
  Trajectory ground_truth;
  stream_sequence(
      world, [&dense_trajectory](double t) { return interpolate_pose(dense_trajectory, t); },
      dense_trajectory.poses.front().timestamp_s, count, cfg,
      [&](int index, const PolarSweep& sweep, const Pose2d& gt) {
        save_sweep(sweep, out_dir / fmt::format("{:06d}.rps", index));
        ground_truth.push_back(sweep.sweep_center_time_s, gt);
      });
  write_tum(ground_truth, out_dir / "gt.tum");
}

World make_loop_world(const LoopScenario& scenario) {
  std::vector<Landmark> landmarks;
  const double hx = scenario.wall_half_x;
  const double hy = scenario.wall_half_y;
  const double sp = scenario.landmark_spacing;
  const double refl = scenario.wall_reflectivity;
  append_segment(landmarks, {-hx, -hy}, {hx, -hy}, sp, refl);
  append_segment(landmarks, {hx, -hy}, {hx, hy}, sp, refl);
  append_segment(landmarks, {hx, hy}, {-hx, hy}, sp, refl);
  append_segment(landmarks, {-hx, hy}, {-hx, -hy}, sp, refl);
  for (int row = 1; row <= scenario.dense_wall_rows; ++row) {
    const double y = hy + row * 3.0 * scenario.landmark_spacing;
    append_segment(landmarks, {hx, y}, {-hx, y}, sp, refl);
  }

  const LoopPath path(scenario.path_half_x, scenario.path_half_y, scenario.turn_length);
  std::mt19937_64 rng(scenario.seed);
  std::uniform_real_distribution<double> ux(-hx + 1.0, hx - 1.0);
  std::uniform_real_distribution<double> uy(-hy + 1.0, hy - 1.0);
  std::uniform_real_distribution<double> ulen(1.0, 2.5);
  std::uniform_real_distribution<double> uangle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> urefl(150.0, 255.0);
  int placed = 0;
  while (placed < scenario.clutter_segments) {
    const Eigen::Vector2d center(ux(rng), uy(rng));
    const double half = 0.5 * ulen(rng);
    const double angle = uangle(rng);
    const double reflectivity = urefl(rng);
    const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
    const Eigen::Vector2d a = center - half * dir;
    const Eigen::Vector2d b = center + half * dir;
    const bool clear = path.distance_to(a) > scenario.clutter_clearance &&
                       path.distance_to(b) > scenario.clutter_clearance &&
                       path.distance_to(center) > scenario.clutter_clearance;
    if (!clear) continue;
    append_segment(landmarks, a, b, sp, reflectivity);
    ++placed;
  }
  return make_world(std::move(landmarks));
}

PoseFunction loop_pose_function(const LoopScenario& scenario) {
  const LoopPath path(scenario.path_half_x, scenario.path_half_y, scenario.turn_length);
  const double speed = path.length() / (scenario.sweep_count * scenario.sweep_duration_s);
  return [path, speed](double t) { return path.at(speed * t); };
}

Trajectory sample_trajectory(const PoseFunction& pose_at, double start_s, double end_s, double rate_hz) {
  Trajectory out;
  const auto samples = static_cast<int>(std::llround((end_s - start_s) * rate_hz));
  for (int i = 0; i <= samples; ++i) {
    const double t = start_s + i / rate_hz;
    out.push_back(t, pose_at(t));
  }
  return out;
}

}  // namespace rodo
