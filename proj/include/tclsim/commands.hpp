#pragma once

// Subcommand implementations behind the `tclsim` executable. Each returns a
// process exit code: 0 success, 1 configuration error, 2 property violation.
// Data goes to `out` and to files; progress and diagnostics go to `err`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tclsim/scenario.hpp"
#include "tclsim/semi_markov.hpp"

namespace tclsim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitViolation = 2 };

enum class Experiment { Stationary, Comfort, Track };

/// Command-line values override the scenario file, which overrides the
/// built-in experiment defaults.
struct RunOptions {
  std::optional<std::filesystem::path> scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_devices;
  std::optional<double> horizon;
  std::optional<std::filesystem::path> output_dir;
};

/// Built-in scenario for an experiment when no file is given.
ScenarioFile default_scenario(Experiment experiment);

/// Applies the precedence rules and validates the result. Throws ConfigError.
ScenarioFile resolve_scenario(Experiment experiment, const RunOptions& options);

int cmd_stationary(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_comfort(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_track(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);

struct SweepRow {
  double duty = 0.0;
  Regime regime = Regime::ForcedOff;
  ControlPair controls;
  SojournStats sojourn;
  double round_trip_error = 0.0;
  /// Mean sojourn of the state whose probability was solved for.
  double solved_sojourn = 0.0;
  bool ok = true;
};

/// Solves d = 0.01..0.99 plus both regime thresholds and checks the duty
/// round trip (< 1e-9) and the t_min floor on the solved sojourn.
std::vector<SweepRow> solver_sweep(const SolverTiming& timing);

int cmd_sweep(const SolverTiming& timing, std::ostream& out, std::ostream& err);

}  // namespace tclsim
