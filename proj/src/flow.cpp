#include "gmcf/flow.hpp"

#include "gmcf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gmcf {
namespace {

constexpr double kOmegaBlowUp = 1e6;

std::string node_label(const PeriodicGrid& grid, std::size_t k) {
  std::ostringstream s;
  s.precision(10);
  const Point x = grid.coordinates(k);
  s << "node " << k << " (x1=" << x[0];
  if (grid.dim() == 2) s << ", x2=" << x[1];
  s << ")";
  return s.str();
}

// Writes the right-hand side into `out` and returns sup omega.
double evaluate_product(const ScalarField& u, const ProductTerms& terms, ScalarField& out) {
  const PeriodicGrid& grid = u.grid();
  double sup_omega = 1.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const NodeGeometry geo = node_geometry(u, k);
    const Point x = grid.coordinates(k);
    try {
      out[k] = geo.trace + terms.h(x, u[k]) + terms.g(x, u[k]) * geo.omega;
    } catch (const EvalError& e) {
      throw EvalError(std::string(e.what()) + " at " + node_label(grid, k) +
                      ", u=" + std::to_string(u[k]));
    }
    sup_omega = std::max(sup_omega, geo.omega);
  }
  return sup_omega;
}

double evaluate_weighted(const ScalarField& p, const WarpedProfile& profile, WeightedForm form,
                         ScalarField& out) {
  const PeriodicGrid& grid = p.grid();
  const double n = grid.dim();
  double sup_omega = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    double r = 0.0;
    try {
      r = profile.height_inverse(p[k]);
    } catch (const RangeError& e) {
      throw ChartError("flow left the chart at " + node_label(grid, k) + ": " + e.what());
    }
    const NodeGeometry geo = node_geometry(p, k);
    const double numerator = geo.trace - n * profile.dphi(r);
    out[k] = form == WeightedForm::as_printed ? numerator / geo.omega : numerator;
    sup_omega = std::max(sup_omega, geo.omega);
  }
  return sup_omega;
}

double evaluate(const FlowProblem& problem, const ScalarField& u, ScalarField& out) {
  if (problem.kind == FlowKind::product) return evaluate_product(u, problem.terms, out);
  return evaluate_weighted(u, *problem.profile, WeightedForm::as_printed, out);
}

}  // namespace

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::stationary: return "stationary";
    case Termination::max_time: return "max_time";
    case Termination::max_steps: return "max_steps";
    case Termination::diverged: return "diverged";
  }
  return "unknown";
}

void FlowProblem::validate() const {
  if (initial.size() == 0) throw std::invalid_argument("flow problem has no initial field");
  if (!initial.all_finite()) throw std::invalid_argument("initial field is not finite");
  if (kind == FlowKind::product && (!terms.h || !terms.g))
    throw std::invalid_argument("product flow needs both h and g");
  if (kind == FlowKind::weighted_warped) {
    if (!profile) throw std::invalid_argument("weighted flow needs a warp profile");
    if (initial.min() < profile->height_lo() || initial.max() > profile->height_hi())
      throw std::invalid_argument("initial field leaves the range of the height transform");
  }
  if (slab) {
    if (!(slab->lower < slab->upper)) throw std::invalid_argument("slab needs lower < upper");
    if (!(initial.min() > slab->lower && initial.max() < slab->upper))
      throw std::invalid_argument("initial field must lie strictly inside the slab");
  }
}

ScalarField rhs_product(const ScalarField& u, const ProductTerms& terms) {
  ScalarField out(u.grid_ptr());
  evaluate_product(u, terms, out);
  return out;
}

ScalarField rhs_weighted(const ScalarField& p, const WarpedProfile& profile, WeightedForm form) {
  ScalarField out(p.grid_ptr());
  evaluate_weighted(p, profile, form, out);
  return out;
}

ScalarField rhs(const FlowProblem& problem, const ScalarField& u) {
  ScalarField out(u.grid_ptr());
  evaluate(problem, u, out);
  return out;
}

double stable_time_step(const PeriodicGrid& grid, double cfl) {
  const double h = grid.min_spacing();
  return cfl * h * h / (2.0 * grid.dim() * grid.max_inverse_metric_eigenvalue());
}

ScalarField step(const ScalarField& u, const FlowProblem& problem, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  ScalarField k(u.grid_ptr());
  evaluate(problem, u, k);
  ScalarField mid = u;
  for (std::size_t i = 0; i < u.size(); ++i) mid[i] += 0.5 * dt * k[i];
  evaluate(problem, mid, k);
  ScalarField next = u;
  for (std::size_t i = 0; i < u.size(); ++i) next[i] += dt * k[i];
  return next;
}

double energy(const ScalarField& u, const WeightPair& weights) {
  const PeriodicGrid& grid = u.grid();
  const GradientField du = gradient(u);
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double omega = std::sqrt(1.0 + squared_norm(du.values[k], grid));
    sum += weights.s(u[k]) * omega - weights.G(grid.coordinates(k), u[k]);
  }
  return sum * grid.cell_volume();
}

double dissipation(const ScalarField& u, const ScalarField& u_t, const WeightPair& weights,
                   FlowKind kind) {
  const PeriodicGrid& grid = u.grid();
  double sum = 0.0;
  if (kind == FlowKind::product) {
    const GradientField du = gradient(u);
    for (std::size_t k = 0; k < u.size(); ++k)
      sum += weights.s(u[k]) * u_t[k] * u_t[k] / std::sqrt(1.0 + squared_norm(du.values[k], grid));
  } else {
    for (std::size_t k = 0; k < u.size(); ++k) sum += weights.s(u[k]) * u_t[k] * u_t[k];
  }
  return sum * grid.cell_volume();
}

FlowStepper::FlowStepper(const FlowProblem& problem, const IntegratorSettings& settings)
    : problem_(&problem),
      dt_(settings.dt ? *settings.dt : stable_time_step(problem.grid(), settings.cfl)),
      u_(problem.initial),
      u_t_(problem.initial.grid_ptr()) {
  problem.validate();
  if (!(dt_ > 0.0)) throw std::invalid_argument("time step must be positive");
  cumulative_ = problem.weights ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  refresh();
}

void FlowStepper::refresh() {
  sup_omega_ = evaluate(*problem_, u_, u_t_);
  rate_ = problem_->weights ? dissipation(u_, u_t_, *problem_->weights, problem_->kind)
                            : std::numeric_limits<double>::quiet_NaN();
}

bool FlowStepper::advance() {
  if (!failure_.empty()) return false;
  ScalarField mid = u_;
  for (std::size_t i = 0; i < u_.size(); ++i) mid[i] += 0.5 * dt_ * u_t_[i];
  const double rate_before = rate_;
  try {
    ScalarField k(u_.grid_ptr());
    evaluate(*problem_, mid, k);
    for (std::size_t i = 0; i < u_.size(); ++i) u_[i] += dt_ * k[i];
    t_ += dt_;
    ++steps_;
    if (!u_.all_finite()) {
      failure_ = "non-finite value in the evolving field";
      return false;
    }
    refresh();
  } catch (const ChartError& e) {
    failure_ = e.what();
    return false;
  }
  if (!u_t_.all_finite()) {
    failure_ = "non-finite right-hand side";
    return false;
  }
  if (sup_omega_ > kOmegaBlowUp) {
    failure_ = "gradient blow-up: sup omega = " + std::to_string(sup_omega_);
    return false;
  }
  if (problem_->weights) cumulative_ += 0.5 * dt_ * (rate_before + rate_);
  return true;
}

TraceSample FlowStepper::sample() const {
  TraceSample s;
  s.t = t_;
  s.step = steps_;
  s.sup_ut = u_t_.sup_norm();
  s.sup_omega = sup_omega_;
  const auto values = u_.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.argmin_node = static_cast<std::size_t>(lo - values.begin());
  s.argmax_node = static_cast<std::size_t>(hi - values.begin());
  s.min_u = *lo;
  s.max_u = *hi;
  if (problem_->weights) {
    s.energy = energy(u_, *problem_->weights);
    s.dissipation_rate = rate_;
    s.cumulative_dissipation = cumulative_;
  }
  return s;
}

FlowTrace run_to_stationary(const FlowProblem& problem, const IntegratorSettings& settings) {
  if (settings.stride == 0) throw std::invalid_argument("sample stride must be positive");
  FlowStepper stepper(problem, settings);
  FlowTrace trace;
  trace.initial = problem.initial;
  trace.dt = stepper.dt();
  const double h = problem.grid().min_spacing();
  trace.spacing_sq = h * h;
  trace.has_energy = problem.weights.has_value();
  trace.slab = problem.slab;

  trace.samples.push_back(stepper.sample());
  // A field that is already stationary needs no confirmation samples.
  bool done = trace.samples.back().sup_ut < settings.tol;
  if (done) trace.reason = Termination::stationary;
  std::size_t below = 0;
  const double t_stop = settings.t_max - 1e-12 * std::max(1.0, settings.t_max);

  while (!done) {
    if (stepper.time() >= t_stop) {
      trace.reason = Termination::max_time;
      break;
    }
    if (stepper.steps() >= settings.max_steps) {
      trace.reason = Termination::max_steps;
      break;
    }
    if (!stepper.advance()) {
      trace.reason = Termination::diverged;
      trace.detail = stepper.failure();
      break;
    }
    if (stepper.steps() % settings.stride == 0) {
      trace.samples.push_back(stepper.sample());
      below = trace.samples.back().sup_ut < settings.tol ? below + 1 : 0;
      if (below >= settings.stationary_samples) {
        trace.reason = Termination::stationary;
        done = true;
      }
    }
  }
  if (trace.reason != Termination::diverged && trace.samples.back().step != stepper.steps())
    trace.samples.push_back(stepper.sample());
  if (trace.reason == Termination::diverged && stepper.state().all_finite() &&
      trace.samples.back().step != stepper.steps()) {
    try {
      trace.samples.push_back(stepper.sample());
    } catch (const std::exception&) {
      // The diverged state may not admit diagnostics; keep the last good sample.
    }
  }
  trace.steps = stepper.steps();
  trace.final_field = stepper.state();
  return trace;
}

SliceTrajectory slice_ode_solve(const WarpedProfile& profile, int n, double r0, double t_end,
                                double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (r0 < profile.lo() || r0 > profile.hi())
    throw RangeError("initial height outside the profile domain");
  const auto speed = [&](double r) { return -n * profile.dphi(r); };
  SliceTrajectory out;
  out.t.push_back(0.0);
  out.r.push_back(r0);
  double t = 0.0, r = r0;
  while (t < t_end - 1e-14 * std::max(1.0, t_end)) {
    const double h = std::min(dt, t_end - t);
    const double k1 = speed(r);
    const double k2 = speed(r + 0.5 * h * k1);
    const double k3 = speed(r + 0.5 * h * k2);
    const double k4 = speed(r + h * k3);
    r += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    t += h;
    if (!(r >= profile.lo() && r <= profile.hi()))
      throw RangeError("slice trajectory left the profile domain at t = " + std::to_string(t));
    out.t.push_back(t);
    out.r.push_back(r);
  }
  return out;
}

}  // namespace gmcf
