#pragma once

// Graphs in the warped product N x_phi R and their correspondence with
// graphs in N x R through the height transform p = Phi(u).

#include "gmcf/conditions.hpp"
#include "gmcf/flow.hpp"

namespace gmcf {

/// Height field u over the torus, valued in the profile domain.
struct WarpedGraph {
  ScalarField height;
  ProfilePtr profile;
};

/// Throws ChartError when some node leaves the profile domain.
void validate(const WarpedGraph& graph);

/// Mean curvature with respect to the downward normal:
///   H = ((sigma^ij - p^i p^j / omega^2) p_ij - n phi'(u)) / (omega phi(u)),
/// p = Phi(u), omega = sqrt(1 + |Dp|^2), with p differentiated on the grid.
ScalarField warped_mean_curvature(const WarpedGraph& graph);

/// The same curvature with the derivatives of p obtained by the chain rule
/// from the grid derivatives of u itself (p_i = u_i / phi,
/// p_ij = u_ij / phi - phi' u_i u_j / phi^2). Agrees with
/// warped_mean_curvature to second order in the spacing and shares no
/// discrete quantity with the transformed flow variable.
ScalarField warped_mean_curvature_from_heights(const WarpedGraph& graph);

ScalarField to_product(const WarpedGraph& graph);
WarpedGraph to_warped(const ScalarField& p, ProfilePtr profile);

/// sup over nodes of |H(Phi(u)) - f phi(u) - n phi'(u) / omega|, with H the
/// product mean curvature of the transformed graph.
double correspondence_residual(const WarpedGraph& graph, const ScalarField& f);

struct PrescribedCurvatureResult {
  WarpedGraph graph;
  FlowTrace trace;
  ConditionReport conditions;
  /// Transformed slab [Phi(u0), Phi(u1)] the flow variable stays in.
  Slab transformed_slab;
  /// sup |H_up - f(x, u)| at the final field, where H_up = -H is the warped
  /// mean curvature for the upward normal, evaluated with
  /// warped_mean_curvature_from_heights (independent of the flow
  /// right-hand side).
  double residual = 0.0;
  bool converged = false;
};

/// Finds a graph of prescribed mean curvature f by running the product flow
/// with g(x, p) = f(x, u) phi(u), h(p) = -n phi'(u), u = Phi^{-1}(p), to
/// stationarity. Under these data the barrier inequalities of the product
/// flow are exactly f(x,u0) >= n phi'/phi (u0), f(x,u1) <= n phi'/phi (u1),
/// and its stationary graphs have mean curvature f for the upward normal.
/// Throws std::invalid_argument when the hypotheses fail and
/// `require_conditions` is set.
PrescribedCurvatureResult solve_prescribed_mc(const Expr& f, ProfilePtr profile, double u0,
                                              double u1, const ScalarField& u_init,
                                              const IntegratorSettings& settings,
                                              bool require_conditions = true);

/// Weights making the weighted flow a gradient flow of the warped area:
/// s(p) = (phi(r) / phi(anchor))^n with r = Phi^{-1}(p), g = 0.
WeightPair weighted_flow_weights(ProfilePtr profile, int n);

/// Product-flow data equivalent to the prescribed curvature problem.
ProductTerms prescribed_curvature_terms(const Expr& f, ProfilePtr profile, int n);

FlowProblem weighted_flow_problem(ProfilePtr profile, double a, double b,
                                  const ScalarField& p_init);

struct WeightedRunResult {
  FlowTrace trace;
  ConditionReport conditions;
  double critical_height = 0.0;
  WarpedGraph final_graph;
  /// sup |u_final - critical_height|.
  double distance_to_slice = 0.0;
};

/// Weighted mean curvature flow of the graph of `u_init` (warped heights,
/// strictly inside (a, b)). Throws std::invalid_argument when the profile
/// conditions fail.
WeightedRunResult weighted_mcf_run(ProfilePtr profile, double a, double b,
                                   const ScalarField& u_init, const IntegratorSettings& settings);

}  // namespace gmcf
