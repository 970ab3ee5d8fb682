#include "gmcf/geometry.hpp"

#include <cmath>

namespace gmcf {
namespace {

inline std::size_t wrap_up(std::size_t i, std::size_t n) { return i + 1 == n ? 0 : i + 1; }
inline std::size_t wrap_down(std::size_t i, std::size_t n) { return i == 0 ? n - 1 : i - 1; }

Vec2 central_gradient(const ScalarField& u, std::size_t node) {
  const PeriodicGrid& g = u.grid();
  const auto [i, j] = g.multi_index(node);
  const std::size_t nx = g.resolution(0);
  Vec2 d;
  d.x = (u[g.index(wrap_up(i, nx), j)] - u[g.index(wrap_down(i, nx), j)]) / (2.0 * g.spacing(0));
  if (g.dim() == 2) {
    const std::size_t ny = g.resolution(1);
    d.y = (u[g.index(i, wrap_up(j, ny))] - u[g.index(i, wrap_down(j, ny))]) / (2.0 * g.spacing(1));
  }
  return d;
}

SymMat central_hessian(const ScalarField& u, std::size_t node) {
  const PeriodicGrid& g = u.grid();
  const auto [i, j] = g.multi_index(node);
  const std::size_t nx = g.resolution(0);
  const std::size_t ip = wrap_up(i, nx), im = wrap_down(i, nx);
  const double c = u[node];
  const double hx = g.spacing(0);
  SymMat h;
  h.xx = (u[g.index(ip, j)] - 2.0 * c + u[g.index(im, j)]) / (hx * hx);
  if (g.dim() == 2) {
    const std::size_t ny = g.resolution(1);
    const std::size_t jp = wrap_up(j, ny), jm = wrap_down(j, ny);
    const double hy = g.spacing(1);
    h.yy = (u[g.index(i, jp)] - 2.0 * c + u[g.index(i, jm)]) / (hy * hy);
    h.xy = (u[g.index(ip, jp)] - u[g.index(ip, jm)] - u[g.index(im, jp)] + u[g.index(im, jm)]) /
           (4.0 * hx * hy);
  }
  return h;
}

// tr(A B) for symmetric A, B.
inline double trace_product(const SymMat& a, const SymMat& b) {
  return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
}

}  // namespace

Vec2 raise(const Vec2& v, const PeriodicGrid& grid) {
  const SymMat& s = grid.inverse_metric();
  if (grid.dim() == 1) return {s.xx * v.x, 0.0};
  return {s.xx * v.x + s.xy * v.y, s.xy * v.x + s.yy * v.y};
}

double squared_norm(const Vec2& v, const PeriodicGrid& grid) {
  const Vec2 up = raise(v, grid);
  return up.x * v.x + up.y * v.y;
}

namespace {

SymMat inverse_induced(const Vec2& up, double omega_sq, const PeriodicGrid& grid) {
  const SymMat& s = grid.inverse_metric();
  SymMat g;
  g.xx = s.xx - up.x * up.x / omega_sq;
  if (grid.dim() == 2) {
    g.xy = s.xy - up.x * up.y / omega_sq;
    g.yy = s.yy - up.y * up.y / omega_sq;
  }
  return g;
}

}  // namespace

NodeGeometry node_geometry(const ScalarField& u, std::size_t node) {
  const PeriodicGrid& grid = u.grid();
  NodeGeometry out;
  out.grad = central_gradient(u, node);
  out.grad_up = raise(out.grad, grid);
  out.hess = central_hessian(u, node);
  const double omega_sq = 1.0 + out.grad_up.x * out.grad.x + out.grad_up.y * out.grad.y;
  out.omega = std::sqrt(omega_sq);
  out.inv_induced = inverse_induced(out.grad_up, omega_sq, grid);
  out.trace = trace_product(out.inv_induced, out.hess);
  return out;
}

GradientField gradient(const ScalarField& u) {
  GradientField out{u.grid_ptr(), std::vector<Vec2>(u.size())};
  for (std::size_t k = 0; k < u.size(); ++k) out.values[k] = central_gradient(u, k);
  return out;
}

HessianField hessian(const ScalarField& u) {
  HessianField out{u.grid_ptr(), std::vector<SymMat>(u.size())};
  for (std::size_t k = 0; k < u.size(); ++k) out.values[k] = central_hessian(u, k);
  return out;
}

ScalarField area_element(const GradientField& du) {
  ScalarField out(du.grid);
  for (std::size_t k = 0; k < du.values.size(); ++k)
    out[k] = std::sqrt(1.0 + squared_norm(du.values[k], *du.grid));
  return out;
}

MatrixField induced_inverse_metric(const GradientField& du) {
  MatrixField out{du.grid, std::vector<SymMat>(du.values.size())};
  for (std::size_t k = 0; k < du.values.size(); ++k) {
    const Vec2 up = raise(du.values[k], *du.grid);
    const double omega_sq = 1.0 + up.x * du.values[k].x + up.y * du.values[k].y;
    out.values[k] = inverse_induced(up, omega_sq, *du.grid);
  }
  return out;
}

ScalarField mean_curvature(const ScalarField& u) {
  ScalarField out(u.grid_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const NodeGeometry geo = node_geometry(u, k);
    out[k] = geo.trace / geo.omega;
  }
  return out;
}

ScalarField second_form_norm(const ScalarField& u) {
  ScalarField out(u.grid_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const NodeGeometry geo = node_geometry(u, k);
    // Mixed tensor M = g^{..} u_{..}; |A|^2 = tr(M M) / omega^2.
    const SymMat& g = geo.inv_induced;
    const SymMat& h = geo.hess;
    const double m11 = g.xx * h.xx + g.xy * h.xy;
    const double m12 = g.xx * h.xy + g.xy * h.yy;
    const double m21 = g.xy * h.xx + g.yy * h.xy;
    const double m22 = g.xy * h.xy + g.yy * h.yy;
    out[k] = (m11 * m11 + 2.0 * m12 * m21 + m22 * m22) / (geo.omega * geo.omega);
  }
  return out;
}

double integrate(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

}  // namespace gmcf
