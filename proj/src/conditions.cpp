#include "gmcf/conditions.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gmcf {
namespace {

// Running minimum of a slack with its location.
struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  Point x{0.0, 0.0};
  double u = 0.0;

  void offer(double slack, const Point& at, double height) {
    if (slack < margin) {
      margin = slack;
      x = at;
      u = height;
    }
  }
};

ConditionResult make_result(std::string name, std::string statement, const Worst& w,
                            bool strict = false) {
  ConditionResult r;
  r.name = std::move(name);
  r.statement = std::move(statement);
  r.margin = w.margin + 0.0;  // no negative zero
  r.pass = strict ? w.margin > 0.0 : w.margin >= 0.0;
  r.x = w.x;
  r.u = w.u;
  return r;
}

double sample_height(double u0, double u1, std::size_t k, std::size_t count) {
  return u0 + (u1 - u0) * static_cast<double>(k) / static_cast<double>(count - 1);
}

}  // namespace

bool ConditionReport::all_pass() const {
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return true;
}

const ConditionResult& ConditionReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw std::out_of_range("no condition named " + name);
}

std::string ConditionReport::to_text() const {
  std::ostringstream out;
  out.precision(10);
  out << checker << ": " << (all_pass() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : conditions) {
    out << "  " << c.name << " " << (c.pass ? "PASS" : "FAIL") << " margin=" << c.margin
        << " x=(" << c.x[0] << "," << c.x[1] << ") u=" << c.u << "  [" << c.statement << "]\n";
  }
  if (critical_height) out << "  critical_height=" << *critical_height << "\n";
  return out.str();
}

ConditionReport check_theorem_conditions(const Expr& h, const Expr& g, double u0, double u1,
                                         const PeriodicGrid& grid, std::size_t u_samples) {
  if (!(u0 < u1)) throw std::invalid_argument("barrier heights need u0 < u1");
  if (u_samples < 64) u_samples = 64;
  const Expr dg = g.diff(Var::u);
  Worst lower, upper, monotone;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point x = grid.coordinates(k);
    lower.offer(g.eval(x, u0) + h.eval(x, u0), x, u0);
    upper.offer(-(g.eval(x, u1) + h.eval(x, u1)), x, u1);
    for (std::size_t j = 0; j < u_samples; ++j) {
      const double u = sample_height(u0, u1, j, u_samples);
      monotone.offer(-dg.eval(x, u), x, u);
    }
  }
  ConditionReport report;
  report.checker = "theorem_conditions";
  report.conditions.push_back(make_result("lower_barrier", "g(x,u0) + h(x,u0) >= 0", lower));
  report.conditions.push_back(make_result("upper_barrier", "g(x,u1) + h(x,u1) <= 0", upper));
  report.conditions.push_back(make_result("monotone_g", "d/du g(x,u) <= 0 on [u0,u1]", monotone));
  return report;
}

ConditionReport check_corollary1_conditions(const Expr& f, const WarpedProfile& profile, double u0,
                                            double u1, const PeriodicGrid& grid,
                                            std::size_t u_samples) {
  if (!(u0 < u1)) throw std::invalid_argument("barrier heights need u0 < u1");
  if (u0 < profile.lo() || u1 > profile.hi())
    throw std::invalid_argument("barrier heights must lie inside the profile domain");
  if (u_samples < 64) u_samples = 64;
  const double n = grid.dim();
  const double slice0 = n * profile.dphi(u0) / profile.phi(u0);
  const double slice1 = n * profile.dphi(u1) / profile.phi(u1);
  const Expr d_fphi = (f * profile.phi_expr()).diff(Var::u);
  Worst lower, upper, monotone;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point x = grid.coordinates(k);
    lower.offer(f.eval(x, u0) - slice0, x, u0);
    upper.offer(slice1 - f.eval(x, u1), x, u1);
    for (std::size_t j = 0; j < u_samples; ++j) {
      const double u = sample_height(u0, u1, j, u_samples);
      monotone.offer(-d_fphi.eval(x, u), x, u);
    }
  }
  ConditionReport report;
  report.checker = "prescribed_curvature_conditions";
  report.conditions.push_back(make_result("lower_barrier", "f(x,u0) >= n phi'(u0)/phi(u0)", lower));
  report.conditions.push_back(make_result("upper_barrier", "f(x,u1) <= n phi'(u1)/phi(u1)", upper));
  report.conditions.push_back(
      make_result("monotone_f_phi", "d/du (f(x,u) phi(u)) <= 0 on [u0,u1]", monotone));
  return report;
}

ConditionReport check_corollary2_conditions(const WarpedProfile& profile, double a, double b,
                                            std::size_t samples) {
  if (!(a < b)) throw std::invalid_argument("interval needs a < b");
  if (a < profile.lo() || b > profile.hi())
    throw std::invalid_argument("interval must lie inside the profile domain");
  if (samples < 1000) samples = 1000;

  const Point origin{0.0, 0.0};
  Worst left, right, convex;
  left.offer(-profile.dphi(a), origin, a);
  right.offer(profile.dphi(b), origin, b);
  for (std::size_t k = 1; k <= samples; ++k) {
    const double u = a + (b - a) * static_cast<double>(k) / static_cast<double>(samples + 1);
    convex.offer(profile.ddphi(u), origin, u);
  }

  ConditionReport report;
  report.checker = "warped_convergence_conditions";
  report.conditions.push_back(make_result("left_slope", "phi'(a) <= 0", left));
  report.conditions.push_back(make_result("right_slope", "phi'(b) > 0", right, true));
  report.conditions.push_back(make_result("convexity", "phi''(u) >= 0 on (a,b)", convex));

  if (report.conditions[0].pass && report.conditions[1].pass) {
    if (profile.dphi(a) == 0.0) {
      report.critical_height = a;
    } else {
      const auto slope = [&](double r) { return profile.dphi(r); };
      const auto tol = [](double lo, double hi) { return hi - lo <= 1e-13; };
      std::uintmax_t max_iter = 200;
      const auto bracket = boost::math::tools::bisect(slope, a, b, tol, max_iter);
      report.critical_height = 0.5 * (bracket.first + bracket.second);
    }
  }
  return report;
}

}  // namespace gmcf
