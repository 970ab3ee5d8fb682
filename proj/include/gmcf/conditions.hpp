#pragma once

// Hypothesis checkers for the existence and convergence results. Each
// condition is evaluated exhaustively on the grid nodes (the grid is the
// computational base manifold) and, where the condition is pointwise in u,
// on a uniform u-sample of the slab. Equality counts as a pass.

#include "gmcf/expr.hpp"
#include "gmcf/grid.hpp"
#include "gmcf/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gmcf {

struct ConditionResult {
  std::string name;
  std::string statement;
  bool pass = false;
  /// Smallest slack over all samples; nonnegative iff the condition holds
  /// (strict conditions need it positive).
  double margin = 0.0;
  /// Where the smallest slack occurs.
  Point x{0.0, 0.0};
  double u = 0.0;
};

struct ConditionReport {
  std::string checker;
  std::vector<ConditionResult> conditions;
  /// Unique zero of phi' in (a, b), set by the warped-convergence checker
  /// when the sign conditions hold.
  std::optional<double> critical_height;

  bool all_pass() const;
  const ConditionResult& find(const std::string& name) const;
  std::string to_text() const;
};

/// Barrier signs g + h >= 0 at u0 and <= 0 at u1 for every node, and
/// d/du g <= 0 on the slab.
ConditionReport check_theorem_conditions(const Expr& h, const Expr& g, double u0, double u1,
                                         const PeriodicGrid& grid, std::size_t u_samples = 64);

/// f(x, u0) >= n phi'/phi (u0), f(x, u1) <= n phi'/phi (u1), and
/// d/du (f phi) <= 0 on the slab.
ConditionReport check_corollary1_conditions(const Expr& f, const WarpedProfile& profile, double u0,
                                            double u1, const PeriodicGrid& grid,
                                            std::size_t u_samples = 64);

/// phi'(a) <= 0 < phi'(b) and phi'' >= 0 on (a, b); locates the zero of phi'.
ConditionReport check_corollary2_conditions(const WarpedProfile& profile, double a, double b,
                                            std::size_t samples = 1000);

}  // namespace gmcf
