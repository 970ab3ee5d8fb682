#include "gmcf/verification.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gmcf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MonitorEntry vacuous(std::string name, std::string detail) {
  MonitorEntry e;
  e.name = std::move(name);
  e.pass = true;
  e.detail = std::move(detail);
  return e;
}

void require_energy(const FlowTrace& trace, const char* monitor) {
  if (!trace.has_energy)
    throw std::invalid_argument(std::string(monitor) +
                                " needs a trace with energies (h must depend on u only)");
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// Mirrors run_to_stationary's bookkeeping for a stepper driven from outside.
struct Recorder {
  FlowStepper stepper;
  FlowTrace trace;
  std::size_t below = 0;
  bool stationary = false;
  bool failed = false;

  Recorder(const FlowProblem& problem, const IntegratorSettings& settings)
      : stepper(problem, settings) {
    trace.initial = problem.initial;
    trace.dt = stepper.dt();
    const double h = problem.grid().min_spacing();
    trace.spacing_sq = h * h;
    trace.has_energy = problem.weights.has_value();
    trace.slab = problem.slab;
    trace.samples.push_back(stepper.sample());
    stationary = trace.samples.back().sup_ut < settings.tol;
  }

  void record(const IntegratorSettings& settings) {
    trace.samples.push_back(stepper.sample());
    below = trace.samples.back().sup_ut < settings.tol ? below + 1 : 0;
    if (below >= settings.stationary_samples) stationary = true;
  }

  void finish(Termination reason) {
    trace.reason = failed ? Termination::diverged : reason;
    trace.detail = stepper.failure();
    trace.steps = stepper.steps();
    trace.final_field = stepper.state();
  }
};

double min_gap(const ScalarField& low, const ScalarField& high, std::size_t& node) {
  double gap = kInf;
  for (std::size_t k = 0; k < low.size(); ++k) {
    const double d = high[k] - low[k];
    if (d < gap) {
      gap = d;
      node = k;
    }
  }
  return gap;
}

}  // namespace

bool MonitorReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

const MonitorEntry& MonitorReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw std::out_of_range("no monitor named " + name);
}

std::string MonitorReport::to_text() const {
  std::ostringstream out;
  out.precision(10);
  for (const auto& e : entries) {
    out << e.name << " " << (e.pass ? "PASS" : "FAIL") << " margin=" << e.margin
        << " t=" << e.time;
    if (e.node) out << " node=" << *e.node;
    if (!e.detail.empty()) out << "  " << e.detail;
    out << "\n";
  }
  return out.str();
}

std::string MonitorReport::to_json() const {
  nlohmann::json doc;
  doc["pass"] = all_pass();
  doc["monitors"] = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json m;
    m["name"] = e.name;
    m["pass"] = e.pass;
    m["margin"] = std::isfinite(e.margin) ? nlohmann::json(e.margin) : nlohmann::json(nullptr);
    m["time"] = e.time;
    m["node"] = e.node ? nlohmann::json(*e.node) : nlohmann::json(nullptr);
    m["detail"] = e.detail;
    doc["monitors"].push_back(std::move(m));
  }
  return doc.dump(2);
}

MonitorEntry monitor_barrier(const FlowTrace& trace, double u0, double u1) {
  MonitorEntry e;
  e.name = "barrier";
  e.margin = kInf;
  std::optional<double> first_violation;
  for (const auto& s : trace.samples) {
    const double lower = s.min_u - u0, upper = u1 - s.max_u;
    const double slack = std::min(lower, upper);
    if (!(slack > 0.0) && !first_violation) first_violation = s.t;
    if (slack < e.margin) {
      e.margin = slack;
      e.time = s.t;
      e.node = lower <= upper ? s.argmin_node : s.argmax_node;
    }
  }
  e.pass = !first_violation && !trace.samples.empty();
  if (first_violation) {
    e.time = *first_violation;
    e.detail = "first violation at t=" + fmt(*first_violation);
  }
  e.detail += (e.detail.empty() ? "" : "; ") + std::string("slab [") + fmt(u0) + ", " + fmt(u1) +
              "]";
  return e;
}

MonitorEntry monitor_gradient(const FlowTrace& trace, double factor) {
  if (trace.samples.empty()) return vacuous("gradient", "empty trace");
  const std::size_t half = (trace.samples.size() + 1) / 2;
  double first = 0.0, overall = 0.0, at = 0.0;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const auto& s = trace.samples[i];
    if (i < half) first = std::max(first, s.sup_omega);
    if (s.sup_omega > overall || !std::isfinite(s.sup_omega)) {
      overall = s.sup_omega;
      at = s.t;
    }
  }
  MonitorEntry e;
  e.name = "gradient";
  e.margin = factor * first - overall;
  e.pass = std::isfinite(overall) && e.margin >= 0.0;
  e.time = at;
  e.detail = "max sup omega " + fmt(overall) + ", first-half max " + fmt(first);
  return e;
}

MonitorEntry monitor_energy(const FlowTrace& trace) {
  require_energy(trace, "energy monitor");
  MonitorEntry e;
  e.name = "energy";
  e.margin = 0.0;
  e.pass = true;
  double worst = kInf;
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    const auto& a = trace.samples[i - 1];
    const auto& b = trace.samples[i];
    const double slack =
        static_cast<double>(b.step - a.step) * 10.0 * trace.dt * trace.spacing_sq;
    const double room = slack - (b.energy - a.energy);
    if (!(room >= 0.0)) e.pass = false;
    if (room < worst) {
      worst = room;
      e.time = b.t;
    }
  }
  if (std::isfinite(worst)) e.margin = worst;
  if (!trace.samples.empty())
    e.detail = "E " + fmt(trace.samples.front().energy) + " -> " + fmt(trace.samples.back().energy);
  return e;
}

MonitorEntry monitor_dissipation_identity(const FlowTrace& trace, double tolerance,
                                          std::size_t skip) {
  require_energy(trace, "dissipation identity monitor");
  if (trace.samples.size() <= skip + 1)
    return vacuous("dissipation_identity", "fewer than " + std::to_string(skip + 2) + " samples");
  const double scale =
      trace.samples.back().cumulative_dissipation - trace.samples.front().cumulative_dissipation;
  double defect = 0.0, worst = -1.0;
  MonitorEntry e;
  e.name = "dissipation_identity";
  for (std::size_t i = skip + 1; i < trace.samples.size(); ++i) {
    const auto& a = trace.samples[i - 1];
    const auto& b = trace.samples[i];
    const double dE = b.energy - a.energy;
    const double dC = b.cumulative_dissipation - a.cumulative_dissipation;
    const double local = std::abs(dE + dC);
    defect += local;
    if (local > worst) {
      worst = local;
      e.time = b.t;
    }
  }
  const double ratio = scale > 0.0 ? defect / scale : (defect > 0.0 ? kInf : 0.0);
  e.margin = tolerance - ratio;
  e.pass = std::isfinite(ratio) && ratio <= tolerance;
  e.detail = "relative defect " + fmt(ratio);
  return e;
}

MonitorEntry monitor_dissipation_plateau(const FlowTrace& trace, double window, double tolerance) {
  require_energy(trace, "dissipation plateau monitor");
  if (trace.samples.size() < 2) return vacuous("dissipation_plateau", "single sample");
  const double t_end = trace.samples.back().t;
  const double t_start = t_end - window * (t_end - trace.samples.front().t);
  const double total = trace.samples.back().cumulative_dissipation;
  double at_start = trace.samples.front().cumulative_dissipation;
  for (const auto& s : trace.samples)
    if (s.t <= t_start) at_start = s.cumulative_dissipation;
  MonitorEntry e;
  e.name = "dissipation_plateau";
  e.time = t_start;
  const double growth = total > 0.0 ? (total - at_start) / total : 0.0;
  e.margin = tolerance - growth;
  e.pass = std::isfinite(growth) && growth < tolerance;
  e.detail = "late growth " + fmt(growth) + " of total " + fmt(total);
  return e;
}

MonitorEntry monitor_ut_decay(const FlowTrace& trace, double tol, double slack) {
  if (trace.samples.empty()) return vacuous("ut_decay", "empty trace");
  const auto& s = trace.samples;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].sup_ut > s[peak].sup_ut) peak = i;
  MonitorEntry e;
  e.name = "ut_decay";
  const double final_ut = s.back().sup_ut;
  e.margin = tol - final_ut;
  e.time = s.back().t;
  bool monotone = true;
  for (std::size_t i = peak + 1; i < s.size(); ++i) {
    const double room = (1.0 + slack) * s[i - 1].sup_ut - s[i].sup_ut;
    if (room < 0.0) {
      if (monotone) e.time = s[i].t;
      monotone = false;
    }
  }
  e.pass = final_ut < tol && monotone;
  e.detail = "final sup|u_t| " + fmt(final_ut);
  if (!monotone) e.detail += "; growth after the peak at t=" + fmt(e.time);
  return e;
}

MonitorReport standard_monitors(const FlowTrace& trace, const MonitorOptions& options) {
  MonitorReport report;
  if (options.barrier)
    report.entries.push_back(monitor_barrier(trace, options.barrier->lower, options.barrier->upper));
  report.entries.push_back(monitor_gradient(trace));
  if (trace.has_energy) {
    report.entries.push_back(monitor_energy(trace));
    report.entries.push_back(monitor_dissipation_identity(trace));
    report.entries.push_back(monitor_dissipation_plateau(trace));
  }
  report.entries.push_back(monitor_ut_decay(trace, options.tol));
  return report;
}

OrderingResult ordering_test(const std::vector<const FlowProblem*>& flows,
                             const IntegratorSettings& settings) {
  if (flows.size() < 2) throw std::invalid_argument("ordering test needs at least two runs");
  for (std::size_t i = 1; i < flows.size(); ++i)
    if (!(flows[i]->grid() == flows[0]->grid()))
      throw std::invalid_argument("comparison test needs all runs on the same grid");
  const auto chain_gap = [&](const auto& field_of, std::size_t& pair, std::size_t& node) {
    double gap = kInf;
    for (std::size_t i = 0; i + 1 < flows.size(); ++i) {
      std::size_t k = 0;
      const double d = min_gap(field_of(i), field_of(i + 1), k);
      if (d < gap) {
        gap = d;
        pair = i;
        node = k;
      }
    }
    return gap;
  };
  std::size_t pair = 0, node = 0;
  const double initial_gap =
      chain_gap([&](std::size_t i) -> const ScalarField& { return flows[i]->initial; }, pair, node);
  if (!(initial_gap > 0.0))
    throw std::invalid_argument("comparison test needs u_low < u_high at every node (min gap " +
                                fmt(initial_gap) + " at node " + std::to_string(node) + ")");
  if (settings.stride == 0) throw std::invalid_argument("sample stride must be positive");

  std::vector<Recorder> runs;
  runs.reserve(flows.size());
  for (const FlowProblem* f : flows) runs.emplace_back(*f, settings);
  for (const Recorder& r : runs)
    if (r.stepper.dt() != runs.front().stepper.dt())
      throw std::invalid_argument("comparison runs must share the time step");
  const auto state = [&](std::size_t i) -> const ScalarField& { return runs[i].stepper.state(); };

  OrderingResult result;
  MonitorEntry& e = result.entry;
  e.name = "comparison";
  e.margin = initial_gap;
  e.node = node;
  e.pass = true;
  result.times.push_back(0.0);
  result.gaps.push_back(initial_gap);

  const auto all = [&](auto pred) { return std::all_of(runs.begin(), runs.end(), pred); };
  const auto any = [&](auto pred) { return std::any_of(runs.begin(), runs.end(), pred); };
  const double t_stop = settings.t_max - 1e-12 * std::max(1.0, settings.t_max);
  const FlowStepper& clock = runs.front().stepper;
  Termination reason = Termination::max_time;
  while (!all([](const Recorder& r) { return r.stationary; })) {
    if (clock.time() >= t_stop) break;
    if (clock.steps() >= settings.max_steps) {
      reason = Termination::max_steps;
      break;
    }
    for (Recorder& r : runs)
      if (!r.stepper.advance()) r.failed = true;
    if (any([](const Recorder& r) { return r.failed; })) break;
    if (clock.steps() % settings.stride == 0) {
      for (Recorder& r : runs) r.record(settings);
      const double gap = chain_gap(state, pair, node);
      result.times.push_back(clock.time());
      result.gaps.push_back(gap);
      if (!(gap > 0.0)) e.pass = false;
      if (gap < e.margin) {
        e.margin = gap;
        e.time = clock.time();
        e.node = node;
      }
    }
  }
  if (all([](const Recorder& r) { return r.stationary; })) reason = Termination::stationary;
  for (Recorder& r : runs) r.finish(reason);
  const auto failed = std::find_if(runs.begin(), runs.end(), [](const Recorder& r) { return r.failed; });
  if (failed != runs.end()) {
    e.pass = false;
    e.detail = "a run failed: " + failed->trace.detail;
  } else {
    e.detail = "min gap " + fmt(e.margin) + " over " + std::to_string(result.gaps.size()) +
               " samples, " + to_string(reason);
  }
  for (Recorder& r : runs) result.traces.push_back(std::move(r.trace));
  return result;
}

ComparisonResult comparison_test(const FlowProblem& low, const FlowProblem& high,
                                 const IntegratorSettings& settings) {
  OrderingResult chain = ordering_test({&low, &high}, settings);
  ComparisonResult result;
  result.entry = std::move(chain.entry);
  result.times = std::move(chain.times);
  result.gaps = std::move(chain.gaps);
  result.low = std::move(chain.traces[0]);
  result.high = std::move(chain.traces[1]);
  return result;
}

}  // namespace gmcf
