#pragma once

#include "gmcf/expr.hpp"
#include "gmcf/quadrature.hpp"

#include <memory>
#include <stdexcept>

namespace gmcf {

class ProfileError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Warp function phi(r) of the ambient metric phi^2(r) sigma + dr^2, with
/// its derivatives and the height transform Phi (Phi' = 1/phi) mapping
/// warped graphs to product graphs.
class WarpedProfile {
 public:
  /// `phi` may only mention u. Rejects profiles that are not strictly
  /// positive on [lo, hi] (checked on the table nodes, at least 1000).
  WarpedProfile(Expr phi, double lo, double hi, double anchor);

  double phi(double r) const { return phi_.eval(r); }
  double dphi(double r) const { return dphi_.eval(r); }
  double ddphi(double r) const { return ddphi_.eval(r); }
  const Expr& phi_expr() const { return phi_; }
  const Expr& dphi_expr() const { return dphi_; }
  const Expr& ddphi_expr() const { return ddphi_; }

  /// Phi(r); anchored so that Phi(anchor) = 0.
  double height(double r) const { return height_(r); }
  /// Phi^{-1}(p); throws RangeError when p is outside [Phi(lo), Phi(hi)].
  double height_inverse(double p) const { return height_.inverse(p); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double anchor() const { return anchor_; }
  double height_lo() const { return height_.value_at_lo(); }
  double height_hi() const { return height_.value_at_hi(); }

 private:
  Expr phi_, dphi_, ddphi_;
  double lo_, hi_, anchor_;
  TabulatedAntiderivative height_;
};

using ProfilePtr = std::shared_ptr<const WarpedProfile>;

/// Builds a profile on [lo, hi]; the anchor defaults to the midpoint.
ProfilePtr build_profile(const Expr& phi, double lo, double hi);
ProfilePtr build_profile(const Expr& phi, double lo, double hi, double anchor);

}  // namespace gmcf
