#pragma once

// Flat periodic tori T^1 / T^2 with a constant metric, and the per-node
// field containers that live on them.

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmcf {

/// Point in the base torus; unused trailing coordinates are zero.
using Point = std::array<double, 2>;

/// Symmetric 2x2 matrix stored by its independent entries. In one
/// dimension only `xx` is meaningful.
struct SymMat {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  bool operator==(const SymMat&) const = default;
};

/// Covariant 2-vector; `y` is zero in one dimension.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform periodic sampling of a flat torus with constant metric sigma.
class PeriodicGrid {
 public:
  /// `resolution` and `period` carry one entry per axis; `sigma` is the row
  /// major n x n metric (1 or 4 entries).
  PeriodicGrid(std::vector<std::size_t> resolution, std::vector<double> period,
               std::vector<double> sigma);

  /// Identity metric, period 2*pi on each axis.
  static PeriodicGrid uniform(int dim, std::size_t resolution);

  int dim() const { return dim_; }
  std::size_t resolution(int axis) const { return resolution_[axis]; }
  double period(int axis) const { return period_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double min_spacing() const;
  std::size_t size() const { return size_; }

  /// Covariant metric sigma_ij and its inverse sigma^ij.
  const SymMat& metric() const { return sigma_; }
  const SymMat& inverse_metric() const { return sigma_inv_; }
  double sqrt_det_metric() const { return sqrt_det_; }
  /// Largest eigenvalue of sigma^{-1}.
  double max_inverse_metric_eigenvalue() const;

  /// Quadrature weight: product of spacings times sqrt(det sigma).
  double cell_volume() const { return cell_volume_; }

  /// Row-major index helpers. In 1D `j` is ignored.
  std::size_t index(std::size_t i, std::size_t j = 0) const { return i * stride_ + j; }
  std::array<std::size_t, 2> multi_index(std::size_t flat) const;
  Point coordinates(std::size_t flat) const;

  bool operator==(const PeriodicGrid&) const = default;

 private:
  int dim_;
  std::array<std::size_t, 2> resolution_{1, 1};
  std::array<double, 2> period_{0.0, 0.0};
  std::array<double, 2> spacing_{0.0, 0.0};
  SymMat sigma_;
  SymMat sigma_inv_;
  double sqrt_det_ = 1.0;
  double cell_volume_ = 0.0;
  std::size_t size_ = 0;
  std::size_t stride_ = 1;
};

using GridPtr = std::shared_ptr<const PeriodicGrid>;

inline GridPtr make_grid(PeriodicGrid grid) {
  return std::make_shared<const PeriodicGrid>(std::move(grid));
}

/// One real value per grid node, row-major over the axes.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  /// Samples `fn(point)` at every node.
  template <class Fn>
  static ScalarField sample(GridPtr grid, Fn&& fn) {
    ScalarField out(grid);
    for (std::size_t k = 0; k < grid->size(); ++k) out.values_[k] = fn(grid->coordinates(k));
    return out;
  }

  const PeriodicGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double min() const;
  double max() const;
  double sup_norm() const;
  bool all_finite() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Covariant gradient components u_i per node.
struct GradientField {
  GridPtr grid;
  std::vector<Vec2> values;
};

/// Coordinate Hessian u_ij per node (covariant Hessian on a flat torus).
struct HessianField {
  GridPtr grid;
  std::vector<SymMat> values;
};

/// Per-node symmetric matrix field, e.g. the induced inverse metric g^ij.
struct MatrixField {
  GridPtr grid;
  std::vector<SymMat> values;
};

}  // namespace gmcf
