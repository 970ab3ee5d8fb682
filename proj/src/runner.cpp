#include "gmcf/runner.hpp"

#include "gmcf/conditions.hpp"
#include "gmcf/verification.hpp"
#include "gmcf/warped.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace gmcf {
namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::filesystem::path output_dir(const RunConfig& config, const RunnerOptions& options) {
  std::filesystem::path dir = options.output_dir.value_or(config.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string trace_csv(const FlowTrace& trace) {
  std::string out = "t,sup_ut,sup_omega,min_u,max_u,energy,cumulative_dissipation\n";
  for (const auto& s : trace.samples) {
    out += g17(s.t) + "," + g17(s.sup_ut) + "," + g17(s.sup_omega) + "," + g17(s.min_u) + "," +
           g17(s.max_u) + "," + g17(s.energy) + "," + g17(s.cumulative_dissipation) + "\n";
  }
  return out;
}

std::string field_csv(const ScalarField& field) {
  const PeriodicGrid& grid = field.grid();
  std::string out = grid.dim() == 1 ? "x1,u\n" : "x1,x2,u\n";
  for (std::size_t k = 0; k < field.size(); ++k) {
    const Point x = grid.coordinates(k);
    out += g17(x[0]) + ",";
    if (grid.dim() == 2) out += g17(x[1]) + ",";
    out += g17(field[k]) + "\n";
  }
  return out;
}

json conditions_json(const ConditionReport& report) {
  json doc;
  doc["checker"] = report.checker;
  doc["pass"] = report.all_pass();
  doc["conditions"] = json::array();
  for (const auto& c : report.conditions) {
    doc["conditions"].push_back({{"name", c.name},
                                 {"statement", c.statement},
                                 {"pass", c.pass},
                                 {"margin", finite_or_null(c.margin)},
                                 {"x", {c.x[0], c.x[1]}},
                                 {"u", c.u}});
  }
  if (report.critical_height) doc["critical_height"] = *report.critical_height;
  return doc;
}

ConditionReport conditions_for(const RunConfig& c) {
  const PeriodicGrid grid = c.make_grid();
  switch (c.kind) {
    case ProblemKind::product_flow:
      return check_theorem_conditions(parse_data(c.h, "data.h"), parse_data(c.g, "data.g"),
                                      *c.lower, *c.upper, grid);
    case ProblemKind::prescribed_mc: {
      const auto profile =
          build_profile(parse_data(c.phi, "data.phi"), c.domain_lower(), c.domain_upper());
      return check_corollary1_conditions(parse_data(c.f, "data.f"), *profile, *c.lower, *c.upper,
                                         grid);
    }
    case ProblemKind::weighted_mcf:
    case ProblemKind::slice_ode: {
      const auto profile =
          build_profile(parse_data(c.phi, "data.phi"), c.domain_lower(), c.domain_upper());
      const double a = c.lower.value_or(c.domain_lower());
      const double b = c.upper.value_or(c.domain_upper());
      return check_corollary2_conditions(*profile, a, b);
    }
  }
  throw std::logic_error("unhandled problem kind");
}

int exit_for(const FlowTrace& trace, const MonitorReport& monitors) {
  switch (trace.reason) {
    case Termination::diverged: return exit_code::diverged;
    case Termination::max_time:
    case Termination::max_steps: return exit_code::max_time;
    case Termination::stationary: break;
  }
  return monitors.all_pass() ? exit_code::ok : exit_code::monitor_failure;
}

struct Outcome {
  FlowTrace trace;
  ScalarField initial;  // in the user's height variable
  ScalarField final_field;
  MonitorReport monitors;
  json extra = json::object();
};

Outcome run_product(const RunConfig& c, const ScalarField& u0, std::ostream& log) {
  const Expr h = parse_data(c.h, "data.h"), g = parse_data(c.g, "data.g");
  FlowProblem problem;
  problem.kind = FlowKind::product;
  problem.initial = u0;
  problem.terms.h = [h](const Point& x, double u) { return h.eval(x, u); };
  problem.terms.g = [g](const Point& x, double u) { return g.eval(x, u); };
  problem.slab = Slab{*c.lower, *c.upper};
  const double width = *c.upper - *c.lower;
  try {
    problem.weights.emplace(build_weights(h, g, *c.lower, *c.lower - width, *c.upper + width));
  } catch (const WeightError& e) {
    log << "note: energy monitors disabled: " << e.what() << "\n";
  }
  Outcome o;
  o.trace = run_to_stationary(problem, c.integrator());
  o.initial = u0;
  o.final_field = o.trace.final_field;
  o.monitors = standard_monitors(o.trace, {problem.slab, c.tol});
  o.extra["final_sup_abs_u"] = o.final_field.sup_norm();
  return o;
}

Outcome run_prescribed(const RunConfig& c, const ScalarField& u0) {
  const auto profile =
      build_profile(parse_data(c.phi, "data.phi"), c.domain_lower(), c.domain_upper());
  const Expr f = parse_data(c.f, "data.f");
  auto result = solve_prescribed_mc(f, profile, *c.lower, *c.upper, u0, c.integrator(), false);
  Outcome o;
  o.initial = u0;
  o.final_field = result.graph.height;
  o.monitors = standard_monitors(result.trace, {result.transformed_slab, c.tol});
  o.extra["residual"] = result.residual;
  o.extra["transformed_slab"] = {result.transformed_slab.lower, result.transformed_slab.upper};
  o.trace = std::move(result.trace);
  return o;
}

Outcome run_weighted(const RunConfig& c, const ScalarField& u0) {
  const auto profile =
      build_profile(parse_data(c.phi, "data.phi"), c.domain_lower(), c.domain_upper());
  auto result = weighted_mcf_run(profile, *c.lower, *c.upper, u0, c.integrator());
  Outcome o;
  o.initial = u0;
  o.final_field = result.final_graph.height;
  const Slab slab{profile->height(*c.lower), profile->height(*c.upper)};
  o.monitors = standard_monitors(result.trace, {slab, c.tol});
  o.extra["critical_height"] = result.critical_height;
  o.extra["distance_to_slice"] = result.distance_to_slice;
  if (result.trace.reason != Termination::diverged) {
    const ScalarField& p = result.trace.final_field;
    o.extra["residual_as_printed"] = rhs_weighted(p, *profile, WeightedForm::as_printed).sup_norm();
    o.extra["residual_omega_free"] = rhs_weighted(p, *profile, WeightedForm::omega_free).sup_norm();
  }
  o.trace = std::move(result.trace);
  return o;
}

}  // namespace

ScalarField initial_field(const RunConfig& config, GridPtr grid) {
  const Expr e = parse_data(config.initial, "initial.u");
  return ScalarField::sample(grid, [&](const Point& x) { return e.eval(x, 0.0); });
}

int command_check(const RunConfig& config, std::ostream& log) {
  const ConditionReport report = conditions_for(config);
  log << report.to_text();
  return report.all_pass() ? exit_code::ok : exit_code::check_failed;
}

int command_run(const RunConfig& config, const RunnerOptions& options, std::ostream& log) {
  if (config.kind == ProblemKind::slice_ode) return command_slice_ode(config, options, log);

  const ConditionReport conditions = conditions_for(config);
  log << conditions.to_text();
  json summary;
  summary["kind"] = to_string(config.kind);
  summary["conditions"] = conditions_json(conditions);
  const auto dir = output_dir(config, options);

  const auto reject = [&](const std::string& why) {
    log << "rejected: " << why << "\n";
    summary["rejected"] = why;
    summary["exit_code"] = exit_code::condition_failure;
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    return exit_code::condition_failure;
  };
  if (!conditions.all_pass() && !options.skip_checks)
    return reject("hypotheses fail (use --skip-checks to run anyway)");

  const GridPtr grid = make_grid(config.make_grid());
  const ScalarField u0 = initial_field(config, grid);
  if (!(u0.min() > *config.lower && u0.max() < *config.upper))
    return reject("initial field must lie strictly inside (lower, upper)");

  Outcome o;
  switch (config.kind) {
    case ProblemKind::product_flow: o = run_product(config, u0, log); break;
    case ProblemKind::prescribed_mc: o = run_prescribed(config, u0); break;
    case ProblemKind::weighted_mcf: o = run_weighted(config, u0); break;
    case ProblemKind::slice_ode: break;
  }

  const int code = exit_for(o.trace, o.monitors);
  const TraceSample& last = o.trace.samples.back();
  summary["termination"] = to_string(o.trace.reason);
  if (!o.trace.detail.empty()) summary["detail"] = o.trace.detail;
  summary["steps"] = o.trace.steps;
  summary["dt"] = o.trace.dt;
  summary["t_final"] = last.t;
  summary["final_sup_ut"] = finite_or_null(last.sup_ut);
  summary["monitors"] = json::parse(o.monitors.to_json());
  summary["results"] = o.extra;
  summary["exit_code"] = code;

  write_file(dir / "trace.csv", trace_csv(o.trace));
  write_file(dir / "initial_field.csv", field_csv(o.initial));
  if (o.final_field.size() == o.initial.size())
    write_file(dir / "final_field.csv", field_csv(o.final_field));
  write_file(dir / "monitors.txt", o.monitors.to_text());
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  log << "termination: " << to_string(o.trace.reason);
  if (!o.trace.detail.empty()) log << " (" << o.trace.detail << ")";
  log << " at t=" << last.t << " after " << o.trace.steps << " steps\n" << o.monitors.to_text();
  for (const auto& [key, value] : o.extra.items()) log << key << " = " << value.dump() << "\n";
  log << "outputs written to " << dir.string() << "\n";
  return code;
}

int command_slice_ode(const RunConfig& config, const RunnerOptions& options, std::ostream& log) {
  if (config.kind != ProblemKind::slice_ode)
    throw ConfigError("slice-ode needs problem.kind = slice_ode");
  const auto profile =
      build_profile(parse_data(config.phi, "data.phi"), config.domain_lower(), config.domain_upper());
  const int n = config.slice.n.value_or(config.grid.dim);
  const SliceTrajectory traj =
      slice_ode_solve(*profile, n, *config.slice.r0, *config.slice.t_end, *config.slice.dt);

  const auto dir = output_dir(config, options);
  std::string table = "t,r\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) table += g17(traj.t[i]) + "," + g17(traj.r[i]) + "\n";
  write_file(dir / "trajectory.csv", table);

  json summary;
  summary["kind"] = to_string(config.kind);
  summary["n"] = n;
  summary["r0"] = *config.slice.r0;
  summary["t_end"] = traj.t.back();
  summary["r_end"] = traj.r.back();
  summary["steps"] = traj.t.size() - 1;
  summary["exit_code"] = exit_code::ok;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  log << "r(" << g17(traj.t.back()) << ") = " << g17(traj.r.back()) << "\n";
  return exit_code::ok;
}

}  // namespace gmcf
