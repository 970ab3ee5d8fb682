#pragma once

#include "gmcf/expr.hpp"
#include "gmcf/quadrature.hpp"

#include <cmath>
#include <functional>

namespace gmcf {

/// Pointwise data term (x, u) -> value.
using NodeFunction = std::function<double(const Point&, double)>;

/// Integrating factors of the energy E = int (s(u) omega - G(x, u)) dx:
///   s(u) = exp(-int_anchor^u h),   G(x, u) = int_anchor^u s(t) g(x, t) dt.
/// Only defined when h depends on u alone.
class WeightPair {
 public:
  /// `lo`/`hi` bound the tabulated range of int h; values outside still
  /// evaluate through direct quadrature.
  WeightPair(std::function<double(double)> h, NodeFunction g, bool g_is_zero, double lo,
             double hi, double anchor);
  /// Weights known in closed form; `s` must satisfy s' = -h s, s(anchor) = 1
  /// and `G` must satisfy dG/du = s g, G(x, anchor) = 0.
  WeightPair(std::function<double(double)> s, std::function<double(double)> h, NodeFunction G,
             double anchor);

  double s(double u) const { return s_(u); }
  double h(double u) const { return h_(u); }
  double G(const Point& x, double u) const { return G_(x, u); }
  double anchor() const { return anchor_; }

 private:
  std::function<double(double)> s_;
  std::function<double(double)> h_;
  NodeFunction G_;
  double anchor_;
};

/// Composite 10-point Gauss-Legendre on panels no wider than 0.25.
double integrate_panels(const std::function<double(double)>& fn, double a, double b);

class WeightError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Weights for expression data. Rejects an `h` that mentions x1 or x2: the
/// energy identity behind the u_t -> 0 argument needs h = h(u).
WeightPair build_weights(const Expr& h, const Expr& g, double anchor, double lo, double hi);

}  // namespace gmcf
