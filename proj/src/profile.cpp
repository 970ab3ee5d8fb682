#include "gmcf/profile.hpp"

#include <cmath>
#include <sstream>

namespace gmcf {
namespace {

constexpr std::size_t kPanels = 4096;

Expr checked_profile(const Expr& phi, double lo, double hi) {
  if (!(lo < hi)) throw ProfileError("profile domain needs lo < hi");
  if (phi.depends_on(Var::x1) || phi.depends_on(Var::x2))
    throw ProfileError("warp profile may only depend on u");
  for (std::size_t k = 0; k <= kPanels; ++k) {
    const double r = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kPanels);
    double value = 0.0;
    try {
      value = phi.eval(r);
    } catch (const EvalError& e) {
      std::ostringstream msg;
      msg << "warp profile cannot be evaluated at u = " << r << ": " << e.what();
      throw ProfileError(msg.str());
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "warp profile must be positive: phi(" << r << ") = " << value;
      throw ProfileError(msg.str());
    }
  }
  return phi;
}

}  // namespace

WarpedProfile::WarpedProfile(Expr phi, double lo, double hi, double anchor)
    : phi_(checked_profile(phi, lo, hi)),
      dphi_(phi_.diff(Var::u)),
      ddphi_(dphi_.diff(Var::u)),
      lo_(lo),
      hi_(hi),
      anchor_(anchor),
      height_([p = phi_](double r) { return 1.0 / p.eval(r); }, lo, hi, anchor, kPanels) {}

ProfilePtr build_profile(const Expr& phi, double lo, double hi) {
  return build_profile(phi, lo, hi, 0.5 * (lo + hi));
}

ProfilePtr build_profile(const Expr& phi, double lo, double hi, double anchor) {
  return std::make_shared<const WarpedProfile>(phi, lo, hi, anchor);
}

}  // namespace gmcf
