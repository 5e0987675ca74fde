// tclsim: run the population experiments and inspect the control solver.

#include <iostream>

#include <CLI11.hpp>

#include "tclsim/commands.hpp"

namespace {

void add_run_options(CLI::App* cmd, tclsim::RunOptions& opts)
{
  cmd->add_option("scenario", opts.scenario, "Scenario JSON file (built-in defaults when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Override the scenario seed");
  cmd->add_option("--n", opts.n_devices, "Override the number of devices");
  cmd->add_option("--horizon", opts.horizon, "Override the simulated horizon in seconds");
  cmd->add_option("--out", opts.output_dir, "Override the output directory");
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Semi-Markov probability control of air-conditioner populations"};
  app.require_subcommand(1);

  tclsim::RunOptions run_opts;
  auto* stationary = app.add_subcommand("stationary", "Fixed (u0,u1) fleet: empirical vs analytic state occupancy");
  add_run_options(stationary, run_opts);
  auto* comfort = app.add_subcommand("comfort", "Random-envelope fleet: SOA density and comfort excursions");
  add_run_options(comfort, run_opts);
  auto* track = app.add_subcommand("track", "Random-envelope fleet: per-period power tracking error");
  add_run_options(track, run_opts);

  tclsim::SolverTiming timing;
  auto* sweep = app.add_subcommand("sweep", "Tabulate the duty -> (u0,u1) solver and check its properties");
  sweep->add_option("--dt", timing.dt, "Tick length in seconds")->capture_default_str();
  sweep->add_option("--t-lock", timing.t_lock, "Lock time in seconds")->capture_default_str();
  sweep->add_option("--t-min", timing.t_min, "Minimum solved sojourn in seconds")->capture_default_str();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and check a scenario file without running it");
  validate->add_option("scenario", validate_path, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tclsim::kExitConfig;
  }

  if (*stationary) return tclsim::cmd_stationary(run_opts, std::cout, std::cerr);
  if (*comfort) return tclsim::cmd_comfort(run_opts, std::cout, std::cerr);
  if (*track) return tclsim::cmd_track(run_opts, std::cout, std::cerr);
  if (*sweep) return tclsim::cmd_sweep(timing, std::cout, std::cerr);
  if (*validate) return tclsim::cmd_validate(validate_path, std::cout, std::cerr);
  return tclsim::kExitConfig;
}
