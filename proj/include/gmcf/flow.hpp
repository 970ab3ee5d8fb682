#pragma once

// Time integration of the graphical flows:
//
//   product flow        u_t = g^ij u_ij + h(x,u) + g(x,u) omega
//   weighted warped     p_t = (g^ij p_ij - n phi'(Phi^{-1}(p))) / omega
//   slice ODE           r_t = -n phi'(r)
//
// with explicit midpoint RK2 under a parabolic step bound, stationarity
// detection, and the energy/dissipation ledger
//   E = int (s(u) omega - G(x,u)) dx,   dE/dt = -D.

#include "gmcf/grid.hpp"
#include "gmcf/profile.hpp"
#include "gmcf/weights.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gmcf {

enum class FlowKind { product, weighted_warped };

/// The weighted right-hand side exactly as stated (carrying 1/omega), or
/// multiplied through by omega. Both have the same zeros.
enum class WeightedForm { as_printed, omega_free };

enum class Termination { stationary, max_time, max_steps, diverged };

std::string to_string(Termination reason);

/// The flow left the range where the height transform is defined.
class ChartError : public RangeError {
 public:
  using RangeError::RangeError;
};

struct ProductTerms {
  NodeFunction h;
  NodeFunction g;
};

/// Closed slab [lower, upper] in the flow variable.
struct Slab {
  double lower = 0.0;
  double upper = 0.0;
};

struct IntegratorSettings {
  double cfl = 0.4;
  /// Stationarity threshold on sup |u_t|.
  double tol = 1e-8;
  double t_max = 200.0;
  /// Steps between trace samples.
  std::size_t stride = 50;
  std::size_t max_steps = std::numeric_limits<std::size_t>::max();
  /// Consecutive samples below `tol` required to declare stationarity.
  std::size_t stationary_samples = 3;
  /// Fixed step override; the parabolic bound is used when unset.
  std::optional<double> dt;
};

struct FlowProblem {
  FlowKind kind = FlowKind::product;
  ScalarField initial;
  ProductTerms terms;          // product flow data
  ProfilePtr profile;          // weighted flow data
  std::optional<Slab> slab;
  /// Enables the energy ledger.
  std::optional<WeightPair> weights;

  const PeriodicGrid& grid() const { return initial.grid(); }
  /// Throws std::invalid_argument when the initial field violates the slab
  /// or the chart of the profile.
  void validate() const;
};

struct TraceSample {
  double t = 0.0;
  std::size_t step = 0;
  double sup_ut = 0.0;
  double sup_omega = 1.0;
  double min_u = 0.0;
  double max_u = 0.0;
  std::size_t argmin_node = 0;
  std::size_t argmax_node = 0;
  /// NaN when the problem carries no weights.
  double energy = std::numeric_limits<double>::quiet_NaN();
  double dissipation_rate = std::numeric_limits<double>::quiet_NaN();
  double cumulative_dissipation = std::numeric_limits<double>::quiet_NaN();
};

struct FlowTrace {
  std::vector<TraceSample> samples;
  ScalarField initial;
  ScalarField final_field;
  Termination reason = Termination::max_time;
  std::string detail;
  double dt = 0.0;
  /// Square of the smallest grid spacing.
  double spacing_sq = 0.0;
  std::size_t steps = 0;
  bool has_energy = false;
  std::optional<Slab> slab;
};

ScalarField rhs_product(const ScalarField& u, const ProductTerms& terms);
ScalarField rhs_weighted(const ScalarField& p, const WarpedProfile& profile,
                         WeightedForm form = WeightedForm::as_printed);
ScalarField rhs(const FlowProblem& problem, const ScalarField& u);

/// cfl * h_min^2 / (2 n Lambda), Lambda the largest eigenvalue of sigma^{-1}.
double stable_time_step(const PeriodicGrid& grid, double cfl);

/// One explicit midpoint step.
ScalarField step(const ScalarField& u, const FlowProblem& problem, double dt);

double energy(const ScalarField& u, const WeightPair& weights);
/// int s u_t^2 / omega for the product flow, int s u_t^2 for the weighted
/// flow (its speed already carries the 1/omega).
double dissipation(const ScalarField& u, const ScalarField& u_t, const WeightPair& weights,
                   FlowKind kind = FlowKind::product);

/// Incremental integrator; two steppers with equal settings advance on the
/// same time grid.
class FlowStepper {
 public:
  FlowStepper(const FlowProblem& problem, const IntegratorSettings& settings);

  double dt() const { return dt_; }
  double time() const { return t_; }
  std::size_t steps() const { return steps_; }
  const ScalarField& state() const { return u_; }

  /// Advances one step. Returns false (and sets `failure()`) when the state
  /// stops being finite, omega exceeds 1e6, or the flow leaves the chart.
  bool advance();
  const std::string& failure() const { return failure_; }

  TraceSample sample() const;

 private:
  void refresh();

  const FlowProblem* problem_;
  double dt_;
  double t_ = 0.0;
  std::size_t steps_ = 0;
  ScalarField u_;
  ScalarField u_t_;
  double sup_omega_ = 1.0;
  double rate_ = 0.0;
  double cumulative_ = 0.0;
  std::string failure_;
};

FlowTrace run_to_stationary(const FlowProblem& problem, const IntegratorSettings& settings);

struct SliceTrajectory {
  std::vector<double> t;
  std::vector<double> r;
};

/// RK4 for r_t = -n phi'(r); throws RangeError if r leaves the profile domain.
SliceTrajectory slice_ode_solve(const WarpedProfile& profile, int n, double r0, double t_end,
                                double dt);

}  // namespace gmcf
