#pragma once

// Subcommands behind the command-line tool. Each returns the process exit
// code and writes human-readable progress to `log`.

#include "gmcf/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace gmcf {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;  // `check` only
inline constexpr int max_time = 2;
inline constexpr int diverged = 3;
inline constexpr int monitor_failure = 4;
inline constexpr int condition_failure = 5;
inline constexpr int usage = 64;
}  // namespace exit_code

struct RunnerOptions {
  /// Run even when the hypothesis checker fails (anti-tests).
  bool skip_checks = false;
  std::optional<std::string> output_dir;
};

/// Initial field from the `[initial] u` expression.
ScalarField initial_field(const RunConfig& config, GridPtr grid);

/// Hypothesis report for the problem kind; 0 iff every condition passes.
int command_check(const RunConfig& config, std::ostream& log);

/// Runs the pipeline and writes trace.csv, initial_field.csv,
/// final_field.csv, monitors.txt and summary.json into the output
/// directory. Exit codes: 0 stationary with all monitors passing,
/// 2 max_time/max_steps, 3 diverged, 4 monitor failure, 5 hypotheses or
/// initial data rejected.
int command_run(const RunConfig& config, const RunnerOptions& options, std::ostream& log);

/// Integrates the slice ODE and writes trajectory.csv and summary.json.
int command_slice_ode(const RunConfig& config, const RunnerOptions& options, std::ostream& log);

}  // namespace gmcf
