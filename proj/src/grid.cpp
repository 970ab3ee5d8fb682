#include "gmcf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gmcf {

PeriodicGrid::PeriodicGrid(std::vector<std::size_t> resolution, std::vector<double> period,
                           std::vector<double> sigma) {
  if (resolution.empty() || resolution.size() > 2)
    throw GridError("grid dimension must be 1 or 2");
  dim_ = static_cast<int>(resolution.size());
  if (period.size() != resolution.size())
    throw GridError("period needs one entry per axis");
  const std::size_t want_sigma = dim_ == 1 ? 1 : 4;
  if (sigma.size() != want_sigma)
    throw GridError("metric needs " + std::to_string(want_sigma) + " entries");

  size_ = 1;
  for (int a = 0; a < dim_; ++a) {
    if (resolution[a] < 8) throw GridError("resolution per axis must be at least 8");
    if (!(period[a] > 0.0) || !std::isfinite(period[a]))
      throw GridError("period per axis must be positive and finite");
    resolution_[a] = resolution[a];
    period_[a] = period[a];
    spacing_[a] = period[a] / static_cast<double>(resolution[a]);
    size_ *= resolution[a];
  }
  stride_ = dim_ == 2 ? resolution_[1] : 1;

  if (dim_ == 1) {
    if (!(sigma[0] > 0.0) || !std::isfinite(sigma[0]))
      throw GridError("metric must be positive definite");
    sigma_ = {sigma[0], 0.0, 0.0};
    sigma_inv_ = {1.0 / sigma[0], 0.0, 0.0};
    sqrt_det_ = std::sqrt(sigma[0]);
    cell_volume_ = spacing_[0] * sqrt_det_;
  } else {
    if (sigma[1] != sigma[2]) throw GridError("metric must be symmetric");
    const double a = sigma[0], b = sigma[1], d = sigma[3];
    const double det = a * d - b * b;
    if (!(a > 0.0) || !(d > 0.0) || !(det > 0.0) || !std::isfinite(det))
      throw GridError("metric must be positive definite");
    sigma_ = {a, b, d};
    sigma_inv_ = {d / det, -b / det, a / det};
    sqrt_det_ = std::sqrt(det);
    cell_volume_ = spacing_[0] * spacing_[1] * sqrt_det_;
  }
}

PeriodicGrid PeriodicGrid::uniform(int dim, std::size_t resolution) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (dim == 1) return PeriodicGrid({resolution}, {two_pi}, {1.0});
  if (dim == 2) return PeriodicGrid({resolution, resolution}, {two_pi, two_pi}, {1.0, 0.0, 0.0, 1.0});
  throw GridError("grid dimension must be 1 or 2");
}

double PeriodicGrid::min_spacing() const {
  return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

double PeriodicGrid::max_inverse_metric_eigenvalue() const {
  if (dim_ == 1) return sigma_inv_.xx;
  const double mean = 0.5 * (sigma_inv_.xx + sigma_inv_.yy);
  const double half_gap = std::hypot(0.5 * (sigma_inv_.xx - sigma_inv_.yy), sigma_inv_.xy);
  return mean + half_gap;
}

std::array<std::size_t, 2> PeriodicGrid::multi_index(std::size_t flat) const {
  if (dim_ == 1) return {flat, 0};
  return {flat / stride_, flat % stride_};
}

Point PeriodicGrid::coordinates(std::size_t flat) const {
  const auto [i, j] = multi_index(flat);
  Point p{static_cast<double>(i) * spacing_[0], 0.0};
  if (dim_ == 2) p[1] = static_cast<double>(j) * spacing_[1];
  return p;
}

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->size(), fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size())
    throw GridError("field has " + std::to_string(values_.size()) + " values, grid has " +
                    std::to_string(grid_->size()) + " nodes");
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::sup_norm() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace gmcf
