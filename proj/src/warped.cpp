#include "gmcf/warped.hpp"

#include "gmcf/geometry.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace gmcf {
namespace {

std::string where(const PeriodicGrid& grid, std::size_t k, double value) {
  std::ostringstream s;
  s.precision(12);
  const Point x = grid.coordinates(k);
  s << "node " << k << " (x1=" << x[0];
  if (grid.dim() == 2) s << ", x2=" << x[1];
  s << ") value " << value;
  return s.str();
}

// Memoises the last Phi^{-1} lookup; h and g are evaluated at the same node
// back to back. Not shared between threads.
struct InverseCache {
  ProfilePtr profile;
  double p = std::numeric_limits<double>::quiet_NaN();
  double r = 0.0;

  double operator()(double value) {
    if (value != p) {
      try {
        r = profile->height_inverse(value);
      } catch (const RangeError& e) {
        throw ChartError(std::string("flow left the chart: ") + e.what());
      }
      p = value;
    }
    return r;
  }
};

}  // namespace

void validate(const WarpedGraph& graph) {
  const PeriodicGrid& grid = graph.height.grid();
  for (std::size_t k = 0; k < graph.height.size(); ++k) {
    const double u = graph.height[k];
    if (!(u >= graph.profile->lo() && u <= graph.profile->hi()))
      throw ChartError("height outside the profile domain at " + where(grid, k, u));
  }
}

ScalarField to_product(const WarpedGraph& graph) {
  validate(graph);
  ScalarField p(graph.height.grid_ptr());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = graph.profile->height(graph.height[k]);
  return p;
}

WarpedGraph to_warped(const ScalarField& p, ProfilePtr profile) {
  ScalarField u(p.grid_ptr());
  for (std::size_t k = 0; k < p.size(); ++k) {
    try {
      u[k] = profile->height_inverse(p[k]);
    } catch (const RangeError&) {
      throw ChartError("transformed height outside the range of Phi at " +
                       where(p.grid(), k, p[k]));
    }
  }
  return {std::move(u), std::move(profile)};
}

ScalarField warped_mean_curvature(const WarpedGraph& graph) {
  const ScalarField p = to_product(graph);
  const WarpedProfile& prof = *graph.profile;
  const double n = p.grid().dim();
  ScalarField out(p.grid_ptr());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const NodeGeometry geo = node_geometry(p, k);
    const double r = graph.height[k];
    out[k] = (geo.trace - n * prof.dphi(r)) / (geo.omega * prof.phi(r));
  }
  return out;
}

ScalarField warped_mean_curvature_from_heights(const WarpedGraph& graph) {
  validate(graph);
  const ScalarField& u = graph.height;
  const PeriodicGrid& grid = u.grid();
  const WarpedProfile& prof = *graph.profile;
  const double n = grid.dim();
  const SymMat& s = grid.inverse_metric();
  ScalarField out(u.grid_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const NodeGeometry geo = node_geometry(u, k);
    const double r = u[k];
    const double phi = prof.phi(r), dphi = prof.dphi(r);
    const Vec2 pi{geo.grad.x / phi, geo.grad.y / phi};
    const double c = dphi / (phi * phi);
    SymMat pij;
    pij.xx = geo.hess.xx / phi - c * geo.grad.x * geo.grad.x;
    pij.xy = geo.hess.xy / phi - c * geo.grad.x * geo.grad.y;
    pij.yy = geo.hess.yy / phi - c * geo.grad.y * geo.grad.y;
    const Vec2 up = raise(pi, grid);
    const double omega_sq = 1.0 + up.x * pi.x + up.y * pi.y;
    const double omega = std::sqrt(omega_sq);
    const double gxx = s.xx - up.x * up.x / omega_sq;
    const double gxy = s.xy - up.x * up.y / omega_sq;
    const double gyy = s.yy - up.y * up.y / omega_sq;
    const double trace = gxx * pij.xx + 2.0 * gxy * pij.xy + gyy * pij.yy;
    out[k] = (trace - n * dphi) / (omega * phi);
  }
  return out;
}

double correspondence_residual(const WarpedGraph& graph, const ScalarField& f) {
  const ScalarField p = to_product(graph);
  const WarpedProfile& prof = *graph.profile;
  const double n = p.grid().dim();
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const NodeGeometry geo = node_geometry(p, k);
    const double r = graph.height[k];
    const double product_h = geo.trace / geo.omega;
    const double defect = product_h - f[k] * prof.phi(r) - n * prof.dphi(r) / geo.omega;
    worst = std::max(worst, std::abs(defect));
  }
  return worst;
}

ProductTerms prescribed_curvature_terms(const Expr& f, ProfilePtr profile, int n) {
  auto cache = std::make_shared<InverseCache>();
  cache->profile = profile;
  ProductTerms terms;
  terms.h = [cache, n](const Point&, double p) { return -n * cache->profile->dphi((*cache)(p)); };
  terms.g = [cache, f](const Point& x, double p) {
    const double r = (*cache)(p);
    return f.eval(x, r) * cache->profile->phi(r);
  };
  return terms;
}

namespace {

// With p = Phi(r), dp = dr / phi: exp(int n phi'(r) dp) = phi(r)^n up to a
// constant, and int s f phi dp = int f phi^n dr.
WeightPair warped_weights(ProfilePtr profile, int n, double r_anchor, std::optional<Expr> f) {
  auto cache = std::make_shared<InverseCache>();
  cache->profile = profile;
  const double scale = std::pow(profile->phi(r_anchor), -n);
  auto s = [cache, n, scale](double p) { return scale * std::pow(cache->profile->phi((*cache)(p)), n); };
  auto h = [cache, n](double p) { return -n * cache->profile->dphi((*cache)(p)); };
  NodeFunction G = [](const Point&, double) { return 0.0; };
  if (f && !f->is_zero()) {
    G = [cache, n, scale, r_anchor, f = *f](const Point& x, double p) {
      const double r = (*cache)(p);
      const WarpedProfile& prof = *cache->profile;
      return scale * integrate_panels(
                         [&](double t) { return f.eval(x, t) * std::pow(prof.phi(t), n); },
                         r_anchor, r);
    };
  }
  return WeightPair(std::move(s), std::move(h), std::move(G), profile->height(r_anchor));
}

}  // namespace

WeightPair weighted_flow_weights(ProfilePtr profile, int n) {
  const double anchor = profile->anchor();
  return warped_weights(std::move(profile), n, anchor, std::nullopt);
}

PrescribedCurvatureResult solve_prescribed_mc(const Expr& f, ProfilePtr profile, double u0,
                                              double u1, const ScalarField& u_init,
                                              const IntegratorSettings& settings,
                                              bool require_conditions) {
  const PeriodicGrid& grid = u_init.grid();
  const int n = grid.dim();
  PrescribedCurvatureResult result;
  result.conditions = check_corollary1_conditions(f, *profile, u0, u1, grid);
  if (require_conditions && !result.conditions.all_pass())
    throw std::invalid_argument("prescribed curvature hypotheses fail:\n" +
                                result.conditions.to_text());
  if (!(u_init.min() > u0 && u_init.max() < u1))
    throw std::invalid_argument("initial graph must lie strictly inside (u0, u1)");

  result.transformed_slab = {profile->height(u0), profile->height(u1)};

  FlowProblem problem;
  problem.kind = FlowKind::product;
  problem.initial = to_product({u_init, profile});
  problem.terms = prescribed_curvature_terms(f, profile, n);
  problem.slab = result.transformed_slab;
  problem.weights.emplace(warped_weights(profile, n, u0, f));

  result.trace = run_to_stationary(problem, settings);
  result.converged = result.trace.reason == Termination::stationary;
  result.graph = to_warped(result.trace.final_field, profile);

  const ScalarField h_down = warped_mean_curvature_from_heights(result.graph);
  double worst = 0.0;
  for (std::size_t k = 0; k < h_down.size(); ++k) {
    const double target = f.eval(grid.coordinates(k), result.graph.height[k]);
    worst = std::max(worst, std::abs(-h_down[k] - target));
  }
  result.residual = worst;
  return result;
}

FlowProblem weighted_flow_problem(ProfilePtr profile, double a, double b,
                                  const ScalarField& p_init) {
  FlowProblem problem;
  problem.kind = FlowKind::weighted_warped;
  problem.initial = p_init;
  problem.slab = Slab{profile->height(a), profile->height(b)};
  problem.weights.emplace(weighted_flow_weights(profile, p_init.grid().dim()));
  problem.profile = std::move(profile);
  return problem;
}

WeightedRunResult weighted_mcf_run(ProfilePtr profile, double a, double b,
                                   const ScalarField& u_init, const IntegratorSettings& settings) {
  WeightedRunResult result;
  result.conditions = check_corollary2_conditions(*profile, a, b);
  if (!result.conditions.all_pass() || !result.conditions.critical_height)
    throw std::invalid_argument("warped convergence hypotheses fail:\n" +
                                result.conditions.to_text());
  result.critical_height = *result.conditions.critical_height;
  if (!(u_init.min() > a && u_init.max() < b))
    throw std::invalid_argument("initial graph must lie strictly inside (a, b)");

  const FlowProblem problem = weighted_flow_problem(profile, a, b, to_product({u_init, profile}));
  result.trace = run_to_stationary(problem, settings);
  result.final_graph = to_warped(result.trace.final_field, profile);
  double worst = 0.0;
  for (double u : result.final_graph.height.values())
    worst = std::max(worst, std::abs(u - result.critical_height));
  result.distance_to_slice = worst;
  return result;
}

}  // namespace gmcf
