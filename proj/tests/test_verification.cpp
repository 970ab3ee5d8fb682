#include "doctest.h"

#include "gmcf/verification.hpp"
#include "gmcf/warped.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace gmcf;

namespace {

FlowProblem product(GridPtr grid, const char* h, const char* init, bool weights) {
  const Expr he = parse_expr(h), e = parse_expr(init);
  FlowProblem p;
  p.kind = FlowKind::product;
  p.initial = ScalarField::sample(grid, [&](const Point& x) { return e.eval(x, 0.0); });
  p.terms.h = [he](const Point& x, double u) { return he.eval(x, u); };
  p.terms.g = [](const Point&, double) { return 0.0; };
  if (weights) p.weights.emplace(build_weights(he, Expr(), -1.0, -4.0, 4.0));
  return p;
}

std::set<std::string> failing(const MonitorReport& r) {
  std::set<std::string> out;
  for (const auto& e : r.entries)
    if (!e.pass) out.insert(e.name);
  return out;
}

const ProfilePtr& cosh_profile() {
  static const ProfilePtr p = build_profile(parse_expr("cosh(u)"), -1.25, 1.25, 0.0);
  return p;
}

FlowProblem weighted(GridPtr grid, double (*u0)(double)) {
  ScalarField p(grid);
  for (std::size_t k = 0; k < p.size(); ++k)
    p[k] = cosh_profile()->height(u0(grid->coordinates(k)[0]));
  return weighted_flow_problem(cosh_profile(), -1.0, 1.0, p);
}

}  // namespace

TEST_CASE("an equilibrium passes everything trivially") {
  const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 32));
  const FlowProblem p = product(grid, "-u", "0", true);
  const FlowTrace trace = run_to_stationary(p, {});
  REQUIRE(trace.samples.size() == 1);
  const MonitorReport r = standard_monitors(trace, {Slab{-1.0, 1.0}, 1e-8});
  CHECK(r.all_pass());
  CHECK(r.entries.size() == 6);
  CHECK(r.find("energy").margin == 0.0);
  CHECK(r.find("dissipation_identity").margin == 0.0);
  CHECK(r.find("barrier").margin == doctest::Approx(1.0));
  CHECK(r.find("gradient").margin == doctest::Approx(0.05));
}

TEST_CASE("the decay run passes every monitor") {
  const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 64));
  FlowProblem p = product(grid, "-u", "0.3 + 0.1*sin(x1)", true);
  p.slab = Slab{-1.0, 1.0};
  const FlowTrace trace = run_to_stationary(p, {});
  const MonitorReport r = standard_monitors(trace, {p.slab, 1e-8});
  CHECK(failing(r).empty());
  CHECK(r.find("barrier").margin > 0.5);
  CHECK(r.find("dissipation_identity").margin > 0.0);

  SUBCASE("reports are pure functions of the trace") {
    const MonitorReport again = standard_monitors(trace, {p.slab, 1e-8});
    CHECK(again.to_text() == r.to_text());
    CHECK(again.to_json() == r.to_json());
    const FlowTrace rerun = run_to_stationary(p, {});
    CHECK(standard_monitors(rerun, {p.slab, 1e-8}).to_text() == r.to_text());
  }
  SUBCASE("serialisations") {
    const auto doc = nlohmann::json::parse(r.to_json());
    CHECK(doc["pass"] == true);
    CHECK(doc["monitors"].size() == r.entries.size());
    CHECK(doc["monitors"][0]["name"] == "barrier");
    const std::string text = r.to_text();
    for (const auto& e : r.entries) CHECK(text.find(e.name + " PASS") != std::string::npos);
    CHECK_THROWS_AS(r.find("nope"), std::out_of_range);
  }
}

TEST_CASE("anti-tests fail exactly their target") {
  const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 64));

  SUBCASE("growing data escape the slab") {
    // h = +u fails the hypotheses; run anyway and watch it leave [-1, 1].
    FlowProblem p = product(grid, "u", "0.3 + 0.1*sin(x1)", true);
    IntegratorSettings s;
    s.t_max = 3.0;
    const FlowTrace trace = run_to_stationary(p, s);
    const MonitorEntry e = monitor_barrier(trace, -1.0, 1.0);
    CHECK_FALSE(e.pass);
    // The sin mode is neutral for h = u, so max u ~ 0.3 e^t + 0.1 reaches 1
    // near ln 3; the report names the first sample past it.
    CHECK(e.time > std::log(3.0) - 0.02);
    CHECK(e.time < std::log(3.0) + 0.1);
    CHECK(e.detail.find("first violation") != std::string::npos);
    CHECK(e.margin < 0.0);
  }
  SUBCASE("a slab whose upper barrier fails") {
    // h = 1.5 - u on [-1, 1]: the run settles at 1.5, outside the slab, and
    // every other monitor is satisfied.
    FlowProblem p = product(grid, "1.5 - u", "0.3 + 0.1*sin(x1)", true);
    const FlowTrace trace = run_to_stationary(p, {});
    CHECK(trace.reason == Termination::stationary);
    const MonitorReport r = standard_monitors(trace, {Slab{-1.0, 1.0}, 1e-8});
    CHECK(failing(r) == std::set<std::string>{"barrier"});
  }
  SUBCASE("late gradient growth") {
    FlowTrace trace;
    trace.dt = 1e-3;
    for (int i = 0; i <= 20; ++i) {
      TraceSample s;
      s.t = 0.1 * i;
      s.step = static_cast<std::size_t>(100 * i);
      s.sup_ut = std::exp(-s.t);
      s.sup_omega = i < 15 ? 1.2 : 1.2 + 10.0 * (i - 14);
      s.min_u = -0.1;
      s.max_u = 0.1;
      trace.samples.push_back(s);
    }
    trace.samples.back().sup_ut = 1e-9;
    const MonitorReport r = standard_monitors(trace, {Slab{-1.0, 1.0}, 1e-8});
    CHECK(failing(r) == std::set<std::string>{"gradient"});
    CHECK(r.find("gradient").time == doctest::Approx(2.0));
    CHECK(r.find("gradient").margin == doctest::Approx(1.05 * 1.2 - 61.2));
  }
  SUBCASE("a run cut off early") {
    FlowProblem p = product(grid, "-u", "0.3 + 0.1*sin(x1)", false);
    p.slab = Slab{-1.0, 1.0};
    IntegratorSettings s;
    s.t_max = 0.2;
    const FlowTrace trace = run_to_stationary(p, s);
    CHECK(trace.reason == Termination::max_time);
    const MonitorReport r = standard_monitors(trace, {p.slab, 1e-8});
    CHECK(failing(r) == std::set<std::string>{"ut_decay"});
    CHECK(r.find("ut_decay").margin == doctest::Approx(1e-8 - trace.samples.back().sup_ut));
  }
  SUBCASE("a broken energy ledger") {
    const FlowProblem p = product(grid, "-u", "0.3 + 0.1*sin(x1)", true);
    FlowTrace trace = run_to_stationary(p, {});
    for (auto& s : trace.samples) s.cumulative_dissipation *= 2.0;
    CHECK(monitor_energy(trace).pass);
    CHECK_FALSE(monitor_dissipation_identity(trace).pass);
    trace.samples[trace.samples.size() / 2].energy += 1.0;
    CHECK_FALSE(monitor_energy(trace).pass);
  }
}

TEST_CASE("energy monitors need energies") {
  FlowTrace trace;
  trace.samples.resize(3);
  CHECK_THROWS_AS(monitor_energy(trace), std::invalid_argument);
  CHECK_THROWS_AS(monitor_dissipation_identity(trace), std::invalid_argument);
  CHECK_THROWS_AS(monitor_dissipation_plateau(trace), std::invalid_argument);
  CHECK(standard_monitors(trace, {}).entries.size() == 2);
}

TEST_CASE("the dissipation identity tightens under refinement") {
  double previous = 1.0;
  for (std::size_t n : {16u, 32u, 64u}) {
    const GridPtr grid = make_grid(PeriodicGrid::uniform(1, n));
    const FlowProblem p = product(grid, "-u", "0.3 + 0.5*sin(x1)", true);
    IntegratorSettings s;
    s.t_max = 2.0;
    const FlowTrace trace = run_to_stationary(p, s);
    const MonitorEntry e = monitor_dissipation_identity(trace);
    REQUIRE(trace.samples.size() > 2);
    const double defect = 0.05 - e.margin;
    CAPTURE(n);
    CAPTURE(defect);
    CHECK(e.pass);
    CHECK(defect < previous);
    previous = defect;
  }
}

TEST_CASE("comparison principle") {
  const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 32));
  IntegratorSettings s;
  s.tol = 1e-6;

  SUBCASE("two slices approach the critical slice without crossing") {
    const FlowProblem low = weighted(grid, [](double) { return -0.5; });
    const FlowProblem high = weighted(grid, [](double) { return 0.5; });
    const ComparisonResult r = comparison_test(low, high, s);
    CHECK(r.entry.pass);
    CHECK(r.entry.margin > 0.0);
    CHECK(r.times.size() == r.gaps.size());
    CHECK(r.low.reason == Termination::stationary);
    CHECK(r.high.reason == Termination::stationary);
    for (std::size_t i = 1; i < r.gaps.size(); ++i) CHECK(r.gaps[i] < r.gaps[i - 1]);
    // Odd symmetry of the slice dynamics.
    CHECK(r.low.final_field.max() == doctest::Approx(-r.high.final_field.min()));
  }
  SUBCASE("a graph stays between two slices") {
    const FlowProblem low = weighted(grid, [](double) { return -0.9; });
    const FlowProblem mid = weighted(grid, [](double x) { return 0.5 + 0.3 * std::sin(x); });
    const FlowProblem high = weighted(grid, [](double) { return 0.9; });
    const OrderingResult r = ordering_test({&low, &mid, &high}, s);
    CHECK(r.entry.pass);
    REQUIRE(r.traces.size() == 3);
    for (std::size_t i = 0; i < r.traces[1].samples.size(); ++i) {
      CHECK(r.traces[0].samples[i].max_u < r.traces[1].samples[i].min_u);
      CHECK(r.traces[1].samples[i].max_u < r.traces[2].samples[i].min_u);
    }
    // The middle run matches a standalone run step for step.
    const FlowTrace alone = run_to_stationary(mid, s);
    const std::size_t common = std::min(alone.samples.size(), r.traces[1].samples.size());
    REQUIRE(common > 1);
    for (std::size_t i = 0; i < common; ++i) {
      CHECK(alone.samples[i].t == r.traces[1].samples[i].t);
      CHECK(alone.samples[i].max_u == r.traces[1].samples[i].max_u);
    }
  }
  SUBCASE("preconditions") {
    const FlowProblem a = weighted(grid, [](double x) { return 0.2 * std::sin(x); });
    CHECK_THROWS_AS(comparison_test(a, a, s), std::invalid_argument);
    const FlowProblem crossing = weighted(grid, [](double x) { return 0.1 * std::cos(x); });
    CHECK_THROWS_AS(comparison_test(a, crossing, s), std::invalid_argument);
    const GridPtr other = make_grid(PeriodicGrid::uniform(1, 16));
    CHECK_THROWS_AS(comparison_test(weighted(other, [](double) { return -0.5; }), a, s),
                    std::invalid_argument);
    CHECK_THROWS_AS(ordering_test({&a}, s), std::invalid_argument);
  }
}
