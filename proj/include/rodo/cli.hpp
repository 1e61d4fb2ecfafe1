#pragma once

#include "rodo/config.hpp"
#include "rodo/sim.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rodo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitMostlyFallback = 2;

struct ConfigSource {
  std::optional<std::filesystem::path> file;
  std::vector<std::string> overrides;  // section.key=value
};

/// Defaults, then the config file, then overrides; validated.
RunConfig resolve_config(const ConfigSource& source);

struct RunOptions {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir = ".";
  ConfigSource config;
};

/// Runs odometry over the sorted `*.rps` files; writes trajectory.tum and diagnostics.csv.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct EvalOptions {
  std::filesystem::path estimate;
  std::filesystem::path ground_truth;
  std::optional<std::vector<double>> segment_lengths_m;  // unset: KITTI lengths, skipped if too short
  int rpe_delta = 1;
  double tolerance_s = 0.05;
  std::optional<std::filesystem::path> metrics_csv;
  std::optional<std::filesystem::path> segments_csv;
};

int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::optional<std::filesystem::path> world;
  std::optional<std::filesystem::path> trajectory;
  bool loop_scenario = false;  // built-in loop world and drive path
  int dense_wall_rows = 0;     // loop scenario only
  std::filesystem::path out_dir;
  SimConfig sim;
};

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

int cmd_dump_config(const ConfigSource& source, std::ostream& out, std::ostream& err);

}  // namespace rodo::cli
