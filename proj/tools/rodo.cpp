#include "rodo/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace rodo::cli;

  CLI::App app{"rodo: spinning-radar odometry, simulator and trajectory evaluation"};
  app.require_subcommand(1);

  ConfigSource config;
  std::string config_file;
  const auto add_config_flags = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_file, "Config file of section.key = value lines")->check(CLI::ExistingFile);
    sub->add_option("--set", config.overrides, "Override a config key: section.key=value");
  };

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Estimate odometry over a directory of .rps sweeps");
  run_cmd->add_option("-i,--input", run.input_dir, "Directory of .rps sweeps")->required();
  run_cmd->add_option("-o,--out", run.output_dir, "Output directory for trajectory.tum and diagnostics.csv");
  add_config_flags(run_cmd);

  EvalOptions eval;
  std::vector<double> segments;
  std::string metrics_csv;
  std::string segments_csv;
  auto* eval_cmd = app.add_subcommand("eval", "Compare an estimated TUM trajectory against ground truth");
  eval_cmd->add_option("--est", eval.estimate, "Estimated trajectory (TUM)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gt", eval.ground_truth, "Ground-truth trajectory (TUM)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--segments", segments, "Segment lengths in meters (default 100..800)")->delimiter(',');
  eval_cmd->add_option("--delta", eval.rpe_delta, "RPE frame delta")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--tolerance", eval.tolerance_s, "Timestamp association tolerance in seconds");
  eval_cmd->add_option("--out", metrics_csv, "Write metrics CSV (metric,value,unit)");
  eval_cmd->add_option("--segments-out", segments_csv, "Write per-segment errors CSV");

  SimulateOptions sim;
  std::string world_file;
  std::string traj_file;
  auto* sim_cmd = app.add_subcommand("simulate", "Render a synthetic sweep sequence with ground truth");
  sim_cmd->add_option("--world", world_file, "World CSV (x,y,reflectivity)");
  sim_cmd->add_option("--traj", traj_file, "Dense ground-truth trajectory (TUM)");
  sim_cmd->add_flag("--loop-scenario", sim.loop_scenario, "Use the built-in rectangular loop world and path");
  sim_cmd->add_option("--dense-wall-rows", sim.dense_wall_rows, "Extra landmark rows behind one loop wall");
  sim_cmd->add_option("--out", sim.out_dir, "Output directory")->required();
  sim_cmd->add_option("--azimuths", sim.sim.azimuth_count)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--bins", sim.sim.range_bin_count)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--gamma", sim.sim.range_resolution_m, "Range resolution (m/bin)")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--duration", sim.sim.sweep_duration_s, "Sweep duration (s)")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--noise", sim.sim.noise_std, "Gaussian intensity noise std")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--speckle", sim.sim.speckle_prob, "Speckle probability")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--seed", sim.sim.seed);

  auto* dump_cmd = app.add_subcommand("dump-config", "Print every config key with its value");
  add_config_flags(dump_cmd);

  CLI11_PARSE(app, argc, argv);
  if (!config_file.empty()) config.file = config_file;

  if (run_cmd->parsed()) {
    run.config = config;
    return cmd_run(run, std::cout, std::cerr);
  }
  if (eval_cmd->parsed()) {
    if (!segments.empty()) eval.segment_lengths_m = segments;
    if (!metrics_csv.empty()) eval.metrics_csv = metrics_csv;
    if (!segments_csv.empty()) eval.segments_csv = segments_csv;
    return cmd_eval(eval, std::cout, std::cerr);
  }
  if (sim_cmd->parsed()) {
    if (!world_file.empty()) sim.world = world_file;
    if (!traj_file.empty()) sim.trajectory = traj_file;
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  return cmd_dump_config(config, std::cout, std::cerr);
}
