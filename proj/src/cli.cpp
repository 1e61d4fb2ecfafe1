#include "rodo/cli.hpp"

#include "rodo/eval.hpp"
#include "rodo/odometry.hpp"

#include <fmt/format.h>

#include <fstream>

namespace rodo::cli {

RunConfig resolve_config(const ConfigSource& source) {
  RunConfig cfg = source.file ? load_config_file(*source.file) : RunConfig{};
  for (const std::string& o : source.overrides) apply_override(cfg, o);
  validate_config(cfg);
  return cfg;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = resolve_config(options.config);
    if (!std::filesystem::is_directory(options.input_dir)) {
      err << fmt::format("error: input directory {} not found\n", options.input_dir.string());
      return kExitError;
    }
    const std::vector<std::filesystem::path> files = list_sweep_files(options.input_dir);
    if (files.empty()) {
      err << "error: no sweeps found\n";
      return kExitError;
    }
    std::filesystem::create_directories(options.output_dir);
    std::ofstream diagnostics(options.output_dir / "diagnostics.csv", std::ios::trunc);
    if (!diagnostics) {
      err << fmt::format("error: cannot write to {}\n", options.output_dir.string());
      return kExitError;
    }
    diagnostics << diagnostics_csv_header();

    RadarOdometry odometry(cfg.odometry);
    int fallbacks = 0;
    for (const auto& file : files) {
      const SweepEstimate estimate = odometry.process_sweep(load_sweep(file));
      diagnostics << diagnostics_csv_row(estimate.diagnostics);
      if (estimate.diagnostics.fallback) ++fallbacks;
    }
    write_tum(odometry.trajectory(), options.output_dir / "trajectory.tum");
    out << fmt::format("processed {} sweeps, {} keyframes, {} registration fallbacks\n", files.size(),
                       odometry.keyframes_created(), fallbacks);
    if (2 * fallbacks > static_cast<int>(files.size())) {
      err << "error: more than half of the sweeps fell back to constant-velocity prediction\n";
      return kExitMostlyFallback;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const Trajectory estimate = read_tum(options.estimate);
    const Trajectory ground_truth = read_tum(options.ground_truth);
    const PoseAssociation assoc = associate(estimate, ground_truth, options.tolerance_s);
    if (assoc.size() < 2) {
      err << fmt::format("error: only {} poses matched within {} s\n", assoc.size(), options.tolerance_s);
      return kExitError;
    }
    if (assoc.unmatched > 0) {
      err << fmt::format("warning: {} estimate poses had no ground truth within {} s\n", assoc.unmatched,
                         options.tolerance_s);
    }

    std::string csv = "metric,value,unit\n";
    const auto report = [&](std::string_view name, double value, std::string_view unit) {
      out << fmt::format("{:<20} {:>12.6f} {}\n", name, value, unit);
      csv += fmt::format("{},{:.9g},{}\n", name, value, unit);
    };

    const std::vector<double> lengths = options.segment_lengths_m.value_or(kitti_segment_lengths());
    std::optional<KittiErrors> kitti;
    try {
      kitti = kitti_errors(assoc.estimate, assoc.ground_truth, lengths);
    } catch (const EvalError& e) {
      if (options.segment_lengths_m) throw;
      err << "note: trajectory shorter than the KITTI segment lengths, translation/rotation drift skipped\n";
    }
    if (kitti) {
      report("translation_error", kitti->translation_percent, "percent");
      report("rotation_error", kitti->deg_per_100m, "deg_per_100m");
    }
    report("rpe", rpe_cm(assoc.estimate, assoc.ground_truth, options.rpe_delta), "cm");
    report("ate", ate_m(assoc.estimate, assoc.ground_truth), "m");

    if (options.metrics_csv) {
      std::ofstream f(*options.metrics_csv, std::ios::trunc);
      if (!(f << csv)) throw EvalError(fmt::format("cannot write {}", options.metrics_csv->string()));
    }
    if (options.segments_csv && kitti) {
      std::ofstream f(*options.segments_csv, std::ios::trunc);
      f << "first,last,length_m,translation_error_m,rotation_error_rad\n";
      for (const SegmentError& s : kitti->segments) {
        f << fmt::format("{},{},{},{:.9g},{:.9g}\n", s.first, s.last, s.length_m, s.translation_error_m,
                         s.rotation_error_rad);
      }
      if (!f) throw EvalError(fmt::format("cannot write {}", options.segments_csv->string()));
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  try {
    World world;
    Trajectory dense;
    if (options.loop_scenario) {
      LoopScenario scenario;
      scenario.sweep_duration_s = options.sim.sweep_duration_s;
      scenario.dense_wall_rows = options.dense_wall_rows;
      world = make_loop_world(scenario);
      dense = sample_trajectory(loop_pose_function(scenario), 0.0,
                                scenario.sweep_count * scenario.sweep_duration_s, 100.0);
      std::filesystem::create_directories(options.out_dir);
      save_world_csv(world, options.out_dir / "world.csv");
      write_tum(dense, options.out_dir / "dense_trajectory.tum");
    } else {
      if (!options.world || !options.trajectory) {
        err << "error: simulate needs --world and --traj (or --loop-scenario)\n";
        return kExitError;
      }
      world = load_world_csv(*options.world);
      dense = read_tum(*options.trajectory);
    }
    if (options.world && options.loop_scenario) err << "note: --world ignored with --loop-scenario\n";
    generate_sequence(world, dense, options.sim, options.out_dir);
    out << fmt::format("wrote {} sweeps to {}\n", sweeps_in(dense, options.sim), options.out_dir.string());
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_dump_config(const ConfigSource& source, std::ostream& out, std::ostream& err) {
  try {
    out << dump_config(resolve_config(source));
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace rodo::cli
