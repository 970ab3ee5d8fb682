#include "doctest.h"
#include "oracles.hpp"

#include "gmcf/geometry.hpp"
#include "gmcf/warped.hpp"

#include <cmath>
#include <random>

using namespace gmcf;

namespace {

ScalarField sample(GridPtr grid, double (*fn)(const Point&)) {
  return ScalarField::sample(std::move(grid), fn);
}

double sine3(const Point& x) { return 0.3 * std::sin(x[0]); }

const ProfilePtr& cosh_profile() {
  static const ProfilePtr p = build_profile(parse_expr("cosh(u)"), -2.0, 2.0, 0.0);
  return p;
}

const ProfilePtr& flat_profile() {
  static const ProfilePtr p = build_profile(Expr::constant(1.0), -3.0, 3.0, 0.0);
  return p;
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

}  // namespace

TEST_CASE("slices") {
  const ProfilePtr quad = build_profile(parse_expr("1 + u^2"), -2.0, 2.0);
  for (int dim : {1, 2}) {
    const GridPtr grid = make_grid(PeriodicGrid::uniform(dim, 16));
    for (const ProfilePtr& prof : {cosh_profile(), quad}) {
      for (double c : {-1.3, -0.2, 0.0, 0.8}) {
        const ScalarField H = warped_mean_curvature({ScalarField(grid, c), prof});
        const ScalarField H2 = warped_mean_curvature_from_heights({ScalarField(grid, c), prof});
        const double expected = -dim * prof->dphi(c) / prof->phi(c);
        for (std::size_t k = 0; k < H.size(); ++k) {
          CHECK(std::abs(H[k] - expected) < 1e-10);
          CHECK(std::abs(H2[k] - expected) < 1e-10);
        }
      }
    }
  }
  // The Fuchsian zero slice is totally geodesic.
  const GridPtr plane = make_grid(PeriodicGrid::uniform(2, 8));
  CHECK(warped_mean_curvature({ScalarField(plane, 0.0), cosh_profile()}).sup_norm() < 1e-15);
}

TEST_CASE("phi = 1 reduces to the product curvature") {
  const GridPtr grid = make_grid(PeriodicGrid::uniform(2, 32));
  const ScalarField u = ScalarField::sample(
      grid, [](const Point& x) { return 0.5 * std::sin(x[0]) * std::cos(x[1]) + 0.2 * std::cos(2 * x[1]); });
  const ScalarField H = mean_curvature(u);
  CHECK(sup_diff(warped_mean_curvature({u, flat_profile()}), H) < 1e-12);
  CHECK(sup_diff(warped_mean_curvature_from_heights({u, flat_profile()}), H) < 1e-12);
  // The correspondence residual is |H - f|.
  ScalarField f = H;
  for (std::size_t k = 0; k < f.size(); ++k) f[k] += 0.125 * std::cos(grid->coordinates(k)[0]);
  CHECK(correspondence_residual({u, flat_profile()}, f) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("both evaluators converge to the analytic curvature") {
  double previous[2] = {0.0, 0.0};
  for (std::size_t n : {64u, 128u, 256u}) {
    const GridPtr grid = make_grid(PeriodicGrid::uniform(1, n));
    const WarpedGraph g{sample(grid, sine3), cosh_profile()};
    const ScalarField a = warped_mean_curvature(g);
    const ScalarField b = warped_mean_curvature_from_heights(g);
    double err[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double x = grid->coordinates(k)[0];
      const double u = 0.3 * std::sin(x);
      const double exact = oracle::warped_curvature_1d(0.3 * std::cos(x), -u, std::cosh(u),
                                                       std::sinh(u));
      err[0] = std::max(err[0], std::abs(a[k] - exact));
      err[1] = std::max(err[1], std::abs(b[k] - exact));
    }
    CAPTURE(n);
    CHECK(err[0] < 1e-3);
    CHECK(err[1] < 1e-3);
    if (previous[0] > 0.0) {
      CHECK(oracle::ratio(previous[0], err[0]) == doctest::Approx(4.0).epsilon(0.125));
      CHECK(oracle::ratio(previous[1], err[1]) == doctest::Approx(4.0).epsilon(0.125));
    }
    previous[0] = err[0];
    previous[1] = err[1];
  }
}

TEST_CASE("height transform") {
  const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 64));
  CHECK(to_product({ScalarField(grid, 0.0), cosh_profile()}).sup_norm() == 0.0);
  const ScalarField one = to_product({ScalarField(grid, 1.0), cosh_profile()});
  CHECK(std::abs(one.max() - oracle::gudermannian(1.0)) < 1e-10);
  CHECK(std::abs(one.min() - 0.8657694) < 1e-7);

  const ScalarField u = sample(grid, sine3);
  const WarpedGraph back = to_warped(to_product({u, cosh_profile()}), cosh_profile());
  CHECK(sup_diff(back.height, u) < 1e-10);

  CHECK_THROWS_AS(to_product({ScalarField(grid, 2.5), cosh_profile()}), ChartError);
  CHECK_THROWS_AS(to_warped(ScalarField(grid, 9.0), cosh_profile()), ChartError);
}

TEST_CASE("correspondence residual") {
  SUBCASE("slice with its own curvature") {
    const GridPtr grid = make_grid(PeriodicGrid::uniform(2, 8));
    for (double c : {-0.7, 0.4}) {
      const ScalarField f(grid, -2.0 * std::sinh(c) / std::cosh(c));
      CHECK(correspondence_residual({ScalarField(grid, c), cosh_profile()}, f) < 1e-14);
    }
  }
  SUBCASE("the same graph's curvature closes the identity") {
    const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 256));
    const WarpedGraph g{sample(grid, sine3), cosh_profile()};
    CHECK(correspondence_residual(g, warped_mean_curvature(g)) < 1e-6);
  }
  SUBCASE("with the height-based curvature the defect is second order") {
    double previous = 0.0;
    for (std::size_t n : {64u, 128u, 256u}) {
      const GridPtr grid = make_grid(PeriodicGrid::uniform(1, n));
      const WarpedGraph g{sample(grid, sine3), cosh_profile()};
      const double r = correspondence_residual(g, warped_mean_curvature_from_heights(g));
      CAPTURE(n);
      CAPTURE(r);
      const double h = grid->spacing(0);
      CHECK(r < h * h);
      if (previous > 0.0) CHECK(oracle::ratio(previous, r) == doctest::Approx(4.0).epsilon(0.125));
      previous = r;
    }
  }
}

TEST_CASE("prescribed-curvature data") {
  const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 16));
  const Expr f = parse_expr("(0.2*sin(x1) - u)/cosh(u)");
  const ProductTerms t = prescribed_curvature_terms(f, cosh_profile(), 1);
  for (double c : {-1.0, 0.3}) {
    // A slice moves at h + g = -phi'(c) + f phi(c).
    const ScalarField p(grid, cosh_profile()->height(c));
    const ScalarField v = rhs_product(p, t);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Point x = grid->coordinates(k);
      CHECK(v[k] == doctest::Approx(-std::sinh(c) + f.eval(x, c) * std::cosh(c)).epsilon(1e-10));
    }
  }
}

TEST_CASE("prescribed-curvature pipeline") {
  const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 64));
  IntegratorSettings s;
  s.tol = 1e-9;

  SUBCASE("f = 0 flattens to the geodesic slice") {
    const ScalarField u0 =
        ScalarField::sample(grid, [](const Point& x) { return 0.2 * std::sin(x[0]); });
    const auto r = solve_prescribed_mc(Expr(), cosh_profile(), -1.0, 1.0, u0, s);
    CHECK(r.converged);
    CHECK(r.residual < 1e-5);
    CHECK(r.graph.height.sup_norm() < 1e-6);
    for (const auto& sample : r.trace.samples) {
      CHECK(sample.min_u > r.transformed_slab.lower);
      CHECK(sample.max_u < r.transformed_slab.upper);
    }
  }
  SUBCASE("phi = 1, f = -u settles at zero") {
    const auto r = solve_prescribed_mc(parse_expr("-u"), flat_profile(), -1.0, 1.0,
                                       ScalarField(grid, 0.5), s);
    CHECK(r.converged);
    CHECK(r.graph.height.sup_norm() < 1e-6);
    CHECK(r.residual < 1e-6);
    CHECK(r.transformed_slab.lower == doctest::Approx(-1.0));
  }
  SUBCASE("the tilted example converges with a small residual") {
    const ScalarField u0 =
        ScalarField::sample(grid, [](const Point& x) { return 0.5 * std::cos(x[0]); });
    const auto r = solve_prescribed_mc(parse_expr("(0.2*sin(x1) - u)/cosh(u)"), cosh_profile(),
                                       -2.0, 2.0, u0, s);
    CHECK(r.converged);
    CHECK(r.residual < 1e-3);
    // Energy descends along the transformed run.
    for (std::size_t i = 1; i < r.trace.samples.size(); ++i)
      CHECK(r.trace.samples[i].energy <= r.trace.samples[i - 1].energy + 1e-12);
  }
  SUBCASE("rejections") {
    const ScalarField u0(grid, 0.0);
    CHECK_THROWS_AS(solve_prescribed_mc(Expr::constant(5.0), cosh_profile(), -1.0, 1.0, u0, s),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_prescribed_mc(Expr(), cosh_profile(), -1.0, 1.0, ScalarField(grid, 1.0), s),
                    std::invalid_argument);
  }
}

TEST_CASE("weighted flow") {
  SUBCASE("weights follow s' = -h s with s = (phi/phi(anchor))^n") {
    const ProfilePtr prof = build_profile(parse_expr("1 + u^2"), -1.5, 1.5, 0.25);
    for (int n : {1, 2}) {
      const WeightPair w = weighted_flow_weights(prof, n);
      CHECK(w.anchor() == doctest::Approx(0.0).epsilon(1e-14));
      std::mt19937 rng(n);
      std::uniform_real_distribution<double> pick(-1.4, 1.4);
      for (int i = 0; i < 50; ++i) {
        const double r = pick(rng);
        const double p = prof->height(r);
        CHECK(w.s(p) == doctest::Approx(std::pow((1 + r * r) / 1.0625, n)).epsilon(1e-10));
        const double ds = oracle::central4([&](double q) { return w.s(q); }, p, 1e-4);
        CHECK(std::abs(ds + w.h(p) * w.s(p)) < 1e-8);
        CHECK(w.G({0.0, 0.0}, p) == 0.0);
      }
    }
  }
  SUBCASE("starting on the critical slice stops at once") {
    const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 64));
    const ProfilePtr shifted = build_profile(parse_expr("cosh(u - 0.3)"), -1.25, 1.25);
    const auto r = weighted_mcf_run(shifted, -1.0, 1.0, ScalarField(grid, 0.3), {});
    CHECK(r.trace.reason == Termination::stationary);
    CHECK(r.trace.steps == 0);
    CHECK(r.critical_height == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.distance_to_slice < 1e-12);
  }
  SUBCASE("a graph converges to the slice") {
    const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 64));
    const ScalarField u0 =
        ScalarField::sample(grid, [](const Point& x) { return 0.5 + 0.3 * std::sin(x[0]); });
    const auto r = weighted_mcf_run(cosh_profile(), -1.0, 1.0, u0, {});
    CHECK(r.trace.reason == Termination::stationary);
    CHECK(r.distance_to_slice < 1e-5);
    const ScalarField& p = r.trace.final_field;
    CHECK(rhs_weighted(p, *cosh_profile(), WeightedForm::as_printed).sup_norm() < 1e-7);
    CHECK(rhs_weighted(p, *cosh_profile(), WeightedForm::omega_free).sup_norm() < 1e-7);
  }
  SUBCASE("rejections") {
    const GridPtr grid = make_grid(PeriodicGrid::uniform(1, 8));
    const ProfilePtr rising = build_profile(parse_expr("exp(u)"), -1.25, 1.25);
    CHECK_THROWS_AS(weighted_mcf_run(rising, -1.0, 1.0, ScalarField(grid, 0.0), {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(weighted_mcf_run(cosh_profile(), -1.0, 1.0, ScalarField(grid, 1.0), {}),
                    std::invalid_argument);
  }
}
