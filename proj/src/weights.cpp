#include "gmcf/weights.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <memory>

namespace gmcf {

double integrate_panels(const std::function<double(double)>& fn, double a, double b) {
  if (a == b) return 0.0;
  const double width = b - a;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(width) / 0.25)));
  const double step = width / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * step;
    total += boost::math::quadrature::gauss<double, 10>::integrate(fn, lo, lo + step);
  }
  return total;
}

WeightPair::WeightPair(std::function<double(double)> h, NodeFunction g, bool g_is_zero, double lo,
                       double hi, double anchor)
    : anchor_(anchor) {
  auto table = std::make_shared<const TabulatedAntiderivative>(h, lo, hi, anchor, 2048);
  s_ = [table](double u) { return std::exp(-(*table)(u)); };
  h_ = std::move(h);
  if (g_is_zero) {
    G_ = [](const Point&, double) { return 0.0; };
  } else {
    G_ = [table, g = std::move(g), anchor](const Point& x, double u) {
      return integrate_panels(
          [&](double t) { return std::exp(-(*table)(t)) * g(x, t); }, anchor, u);
    };
  }
}

WeightPair::WeightPair(std::function<double(double)> s, std::function<double(double)> h,
                       NodeFunction G, double anchor)
    : s_(std::move(s)), h_(std::move(h)), G_(std::move(G)), anchor_(anchor) {}

WeightPair build_weights(const Expr& h, const Expr& g, double anchor, double lo, double hi) {
  if (h.depends_on(Var::x1) || h.depends_on(Var::x2))
    throw WeightError(
        "energy weights need h to depend on u only; h = " + h.to_string() +
        " mentions x, so the dissipation identity and the u_t -> 0 argument do not apply");
  return WeightPair([h](double u) { return h.eval(u); },
                    [g](const Point& x, double u) { return g.eval(x, u); }, g.is_zero(), lo, hi,
                    anchor);
}

}  // namespace gmcf
