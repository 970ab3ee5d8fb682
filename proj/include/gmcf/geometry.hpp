#pragma once

// Discrete geometry of graphs x -> (x, u(x)) over a flat torus, using
// second-order central differences with periodic wraparound. The graph
// normal is the downward one, so a graph that is concave at a maximum has
// negative mean curvature.

#include "gmcf/grid.hpp"

namespace gmcf {

/// Everything the graph formulas need at one node.
struct NodeGeometry {
  Vec2 grad;          // u_i
  Vec2 grad_up;       // u^i = sigma^ij u_j
  SymMat hess;        // u_ij
  double omega = 1.0;
  SymMat inv_induced;  // g^ij = sigma^ij - u^i u^j / omega^2
  double trace = 0.0;  // g^ij u_ij
};

NodeGeometry node_geometry(const ScalarField& u, std::size_t node);

GradientField gradient(const ScalarField& u);
HessianField hessian(const ScalarField& u);

/// u^i from u_i.
Vec2 raise(const Vec2& covariant, const PeriodicGrid& grid);
/// sigma^kl u_k u_l.
double squared_norm(const Vec2& covariant, const PeriodicGrid& grid);

/// omega = sqrt(1 + |Du|^2).
ScalarField area_element(const GradientField& du);

/// g^ij of the graph metric sigma_ij + u_i u_j.
MatrixField induced_inverse_metric(const GradientField& du);

/// H = g^ij u_ij / omega.
ScalarField mean_curvature(const ScalarField& u);

/// |A|^2 = g^il g^kj u_kl u_ij / omega^2.
ScalarField second_form_norm(const ScalarField& u);

/// Trapezoid sum with weight `cell_volume()`; exact for constants and
/// spectrally accurate for smooth periodic integrands.
double integrate(const ScalarField& f);

}  // namespace gmcf
