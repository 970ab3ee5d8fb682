#pragma once

// Executable monitors over flow traces: barrier containment, no late
// gradient growth, energy descent, the dissipation identity and its
// plateau, decay of u_t, and the comparison (disjointness) principle.
// Monitors are pure functions of their traces.

#include "gmcf/flow.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace gmcf {

struct MonitorEntry {
  std::string name;
  bool pass = false;
  /// Worst slack; negative iff the monitored inequality is violated.
  double margin = 0.0;
  /// Sample time of the worst slack (first violation for the barrier).
  double time = 0.0;
  std::optional<std::size_t> node;
  std::string detail;
};

struct MonitorReport {
  std::vector<MonitorEntry> entries;

  bool all_pass() const;
  /// Throws std::out_of_range for an unknown name.
  const MonitorEntry& find(const std::string& name) const;
  /// One line per monitor: name, PASS/FAIL, margin, location, detail.
  std::string to_text() const;
  /// Machine-readable form {"pass": bool, "monitors": [...]}.
  std::string to_json() const;
};

/// u0 < min u and max u < u1 at every sample.
MonitorEntry monitor_barrier(const FlowTrace& trace, double u0, double u1);

/// max sup omega <= 1.05 * (max sup omega over the first half of samples).
MonitorEntry monitor_gradient(const FlowTrace& trace, double factor = 1.05);

/// E nonincreasing between samples up to 10 dt dx^2 per step taken.
MonitorEntry monitor_energy(const FlowTrace& trace);

/// Discrete dE/dt + D = 0: after the first `skip` samples,
///   sum |dE + dC| / (C_end - C_0) <= tolerance,
/// where C is the cumulative dissipation. The defect is measured against
/// the total dissipation, not per interval: near equilibrium dE picks up a
/// truncation term linear in u_t while dC is quadratic. Passes vacuously on
/// short traces or when nothing was dissipated.
MonitorEntry monitor_dissipation_identity(const FlowTrace& trace, double tolerance = 0.05,
                                          std::size_t skip = 0);

/// Growth of the cumulative dissipation over the last `window` fraction of
/// the time span is below `tolerance` times its final value.
MonitorEntry monitor_dissipation_plateau(const FlowTrace& trace, double window = 0.1,
                                         double tolerance = 0.01);

/// Final sup |u_t| < tol and, after its maximum, each sample is at most
/// (1 + slack) times the previous one.
MonitorEntry monitor_ut_decay(const FlowTrace& trace, double tol, double slack = 0.1);

struct MonitorOptions {
  std::optional<Slab> barrier;
  double tol = 1e-8;
};

/// Every monitor that applies to the trace: barrier when a slab is given,
/// the energy family when the trace carries energies.
MonitorReport standard_monitors(const FlowTrace& trace, const MonitorOptions& options);

struct ComparisonResult {
  MonitorEntry entry;
  std::vector<double> times;
  /// min over nodes of u_high - u_low at each sample.
  std::vector<double> gaps;
  FlowTrace low;
  FlowTrace high;
};

struct OrderingResult {
  MonitorEntry entry;
  std::vector<double> times;
  /// min over consecutive pairs and nodes of u_{i+1} - u_i at each sample.
  std::vector<double> gaps;
  /// One trace per run, in input order.
  std::vector<FlowTrace> traces;
};

/// Comparison principle for a chain u_0 < u_1 < ... of runs advanced in
/// lockstep: every consecutive pair must stay strictly ordered at every
/// sample. Preconditions as for comparison_test, pairwise.
OrderingResult ordering_test(const std::vector<const FlowProblem*>& flows,
                             const IntegratorSettings& settings);

/// Advances both problems in lockstep on the same time grid and checks that
/// min (u_high - u_low) > 0 at every sample. Throws std::invalid_argument
/// unless u_low < u_high at every node initially, or when the grids differ.
ComparisonResult comparison_test(const FlowProblem& low, const FlowProblem& high,
                                 const IntegratorSettings& settings);

}  // namespace gmcf
