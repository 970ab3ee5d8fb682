#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gmcf {

/// A value fell outside the range a tabulated map covers.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Adaptive Gauss-Kronrod (15 point) quadrature of `fn` over [a, b] to an
/// absolute tolerance (or the roundoff floor of the integrand, if larger).
double integrate_adaptive(const std::function<double(double)>& fn, double a, double b,
                          double tolerance = 1e-14);

/// Antiderivative F(r) = int_anchor^r f of a smooth scalar function.
///
/// Node values on a uniform table over [lo, hi] come from adaptive
/// quadrature panel by panel; between nodes F is the cubic Hermite
/// interpolant through (F_k, f_k), whose error is below 1e-14 for the
/// default table size and smooth integrands. Outside the table F falls back
/// to direct quadrature from the nearest endpoint.
class TabulatedAntiderivative {
 public:
  TabulatedAntiderivative(std::function<double(double)> integrand, double lo, double hi,
                          double anchor, std::size_t panels = 4096);

  double operator()(double r) const;
  /// Derivative of the interpolant (equals the integrand at table nodes).
  double slope(double r) const;
  /// Inverse of F on [lo, hi]; requires a strictly positive integrand.
  /// Bisection-safeguarded Newton to 1e-14 in r.
  double inverse(double value) const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double anchor() const { return anchor_; }
  double value_at_lo() const { return values_.front(); }
  double value_at_hi() const { return values_.back(); }
  double integrand(double r) const { return integrand_(r); }
  /// Node abscissae and integrand samples of the table.
  std::size_t panel_count() const { return values_.size() - 1; }
  double node(std::size_t k) const { return lo_ + static_cast<double>(k) * step_; }
  double integrand_at_node(std::size_t k) const { return slopes_[k]; }

 private:
  double hermite(std::size_t panel, double r) const;
  double hermite_slope(std::size_t panel, double r) const;
  std::size_t panel_of(double r) const;

  std::function<double(double)> integrand_;
  double lo_, hi_, anchor_, step_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  // First panel reaching each of `panels` equal slices of [F(lo), F(hi)];
  // turns the panel search in `inverse` into a short forward walk.
  std::vector<std::size_t> bucket_start_;
  double bucket_width_ = 0.0;
};

}  // namespace gmcf
