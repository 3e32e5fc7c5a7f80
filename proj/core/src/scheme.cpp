// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/scheme.hpp"

#include <cmath>

namespace eulervisc {

std::vector<std::string> SchemeParams::validate(bool large_model) const {
  std::vector<std::string> v;
  if (!(tau > 0.0)) v.push_back("tau must be > 0 (time step of the Rothe scheme)");
  if (!(p_exp > 3.0))
    v.push_back("hyperviscosity exponent violates the existence hypothesis p > 3 "
                "(Prop. on weak solutions, 'r>3 and let p>3')");
  if (!(r_exp > 3.0))
    v.push_back("density-gradient exponent violates the hypothesis r > 3");
  if (large_model && nu > 0.0 && !(q_exp > 3.0))
    v.push_back("inelastic-gradient exponent violates the hypothesis min(p,q) > 3");
  if (eps < 0.0) v.push_back("eps must be >= 0");
  if (delta < 0.0) v.push_back("delta must be >= 0");
  if (mu < 0.0) v.push_back("mu must be >= 0");
  if (K_V < 0.0 || G_V < 0.0) v.push_back("Stokes moduli must be >= 0");
  if (R < 0.0) v.push_back("reciprocal Maxwell modulus R = 1/G_M must be >= 0");
  if (nu < 0.0) v.push_back("nu must be >= 0");
  return v;
}

void SchemeParams::require_valid(bool large_model) const {
  auto v = validate(large_model);
  if (!v.empty() && !unsafe_override)
    throw ValidationError("scheme parameters violate model hypotheses "
                          "(pass unsafe override to run anyway)", v);
}

double cutoff_K(double rho, double rho_max) {
  if (rho < 0.0 || rho >= rho_max + 1.0) return 0.0;
  if (rho <= rho_max) return 1.0;
  const double t = rho - rho_max;  // in (0, 1)
  return 1.0 - t * t * (3.0 - 2.0 * t);  // C1 monotone smoothstep
}

double cutoff_K_rho(double rho, double rho_max) { return cutoff_K(rho, rho_max) * rho; }

double cutoff_K_rho_lipschitz(double rho_max) {
  // d/drho [K rho] = K + rho K'; on the band |K'| <= 3/2, K <= 1.
  return std::max(1.0, 1.0 + 1.5 * (rho_max + 1.0));
}

}  // namespace eulervisc
