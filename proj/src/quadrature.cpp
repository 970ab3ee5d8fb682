#include "gmcf/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gmcf {

namespace {

// One Gauss-Kronrod 15 panel, bisected until the Kronrod-Gauss difference
// is below an absolute tolerance (split evenly between halves).
double gk_absolute(const std::function<double(double)>& fn, double a, double b, double tolerance,
                   int depth) {
  double error = 0.0, l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(fn, a, b, 0, 0.0, &error, &l1);
  // The roundoff floor stops the bisection for large integrands.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  if (error <= std::max(tolerance, floor) || depth == 0) return value;
  const double mid = 0.5 * (a + b);
  return gk_absolute(fn, a, mid, 0.5 * tolerance, depth - 1) +
         gk_absolute(fn, mid, b, 0.5 * tolerance, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& fn, double a, double b,
                          double tolerance) {
  if (a == b) return 0.0;
  return gk_absolute(fn, a, b, tolerance, 12);
}

TabulatedAntiderivative::TabulatedAntiderivative(std::function<double(double)> integrand,
                                                 double lo, double hi, double anchor,
                                                 std::size_t panels)
    : integrand_(std::move(integrand)), lo_(lo), hi_(hi), anchor_(anchor) {
  if (!(lo < hi)) throw std::invalid_argument("antiderivative table needs lo < hi");
  if (panels < 2) throw std::invalid_argument("antiderivative table needs at least 2 panels");
  step_ = (hi - lo) / static_cast<double>(panels);
  values_.assign(panels + 1, 0.0);
  slopes_.assign(panels + 1, 0.0);
  for (std::size_t k = 0; k <= panels; ++k) slopes_[k] = integrand_(node(k));
  for (std::size_t k = 0; k < panels; ++k)
    values_[k + 1] = values_[k] + integrate_adaptive(integrand_, node(k), node(k + 1));

  // Re-anchor so that F(anchor) = 0. Anchors inside the table use the
  // interpolant, outside ones direct quadrature.
  double offset = 0.0;
  if (anchor >= lo && anchor <= hi) {
    offset = hermite(panel_of(anchor), anchor);
  } else {
    offset = anchor < lo ? -integrate_adaptive(integrand_, anchor, lo)
                         : values_.back() + integrate_adaptive(integrand_, hi, anchor);
  }
  for (double& v : values_) v -= offset;

  bucket_width_ = (values_.back() - values_.front()) / static_cast<double>(panels);
  if (bucket_width_ > 0.0) {
    bucket_start_.assign(panels, 0);
    std::size_t k = 0;
    for (std::size_t j = 0; j < panels; ++j) {
      const double start = values_.front() + static_cast<double>(j) * bucket_width_;
      while (k + 1 < panels && values_[k + 1] <= start) ++k;
      bucket_start_[j] = k;
    }
  }
}

std::size_t TabulatedAntiderivative::panel_of(double r) const {
  const double t = std::floor((r - lo_) / step_);
  const auto last = static_cast<double>(panel_count() - 1);
  return static_cast<std::size_t>(std::clamp(t, 0.0, last));
}

double TabulatedAntiderivative::hermite(std::size_t k, double r) const {
  const double t = (r - node(k)) / step_;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[k] + h10 * step_ * slopes_[k] + h01 * values_[k + 1] +
         h11 * step_ * slopes_[k + 1];
}

double TabulatedAntiderivative::hermite_slope(std::size_t k, double r) const {
  const double t = (r - node(k)) / step_;
  const double t2 = t * t;
  const double d00 = 6.0 * t2 - 6.0 * t;
  const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double d01 = -6.0 * t2 + 6.0 * t;
  const double d11 = 3.0 * t2 - 2.0 * t;
  return (d00 * values_[k] + d01 * values_[k + 1]) / step_ + d10 * slopes_[k] + d11 * slopes_[k + 1];
}

double TabulatedAntiderivative::operator()(double r) const {
  if (r < lo_) return values_.front() - integrate_adaptive(integrand_, r, lo_);
  if (r > hi_) return values_.back() + integrate_adaptive(integrand_, hi_, r);
  return hermite(panel_of(r), r);
}

double TabulatedAntiderivative::slope(double r) const {
  if (r < lo_ || r > hi_) return integrand_(r);
  return hermite_slope(panel_of(r), r);
}

double TabulatedAntiderivative::inverse(double value) const {
  const double span = std::abs(values_.back() - values_.front());
  const double slack = 1e-13 * std::max(1.0, span);
  if (!(value >= values_.front() - slack && value <= values_.back() + slack))
    throw RangeError("value " + std::to_string(value) + " outside tabulated range [" +
                     std::to_string(values_.front()) + ", " + std::to_string(values_.back()) + "]");
  if (value <= values_.front()) return lo_;
  if (value >= values_.back()) return hi_;

  std::size_t k = 0;
  if (!bucket_start_.empty()) {
    const double slot = std::floor((value - values_.front()) / bucket_width_);
    const auto last = static_cast<double>(bucket_start_.size() - 1);
    k = bucket_start_[static_cast<std::size_t>(std::clamp(slot, 0.0, last))];
  }
  while (k + 1 < panel_count() && values_[k + 1] <= value) ++k;
  while (k > 0 && values_[k] > value) --k;
  double a = node(k), b = node(k + 1);
  // Guess from the Hermite interpolant of the inverse itself (its slope at
  // the nodes is 1/f), then Newton on the panel cubic; any step leaving the
  // current bracket is replaced by bisection.
  const double width = values_[k + 1] - values_[k];
  const double t = (value - values_[k]) / width;
  const double t2 = t * t, t3 = t2 * t;
  double r = (2.0 * t3 - 3.0 * t2 + 1.0) * a + (-2.0 * t3 + 3.0 * t2) * b +
             (t3 - 2.0 * t2 + t) * width / slopes_[k] + (t3 - t2) * width / slopes_[k + 1];
  if (!(r > a && r < b)) r = a + (b - a) * t;
  for (int iter = 0; iter < 60; ++iter) {
    const double f = hermite(k, r) - value;
    if (f > 0.0) b = r;
    else a = r;
    const double d = hermite_slope(k, r);
    if (f == 0.0) return r;
    double next = d > 0.0 ? r - f / d : 0.5 * (a + b);
    // Converged Newton steps may land on the bracket edge just moved to r.
    if (std::abs(next - r) <= 1e-14 * std::max(1.0, std::abs(r))) return next;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    r = next;
  }
  return r;
}

}  // namespace gmcf
