// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

namespace eulervisc {

/// Conservation / dissipation bookkeeping for one accepted step, with every
/// quadrature matching the stepper's stencils so the discrete energy
/// inequality is testable at solver precision.
struct EnergyReport {
  double time = 0.0;
  double tau = 0.0;

  double kinetic = 0.0;  // sum |p|^2/(2 rho) h^d
  double stored = 0.0;   // sum phi h^d (regularized phi for the large model)

  // dissipation rates (J/s)
  double diss_stokes = 0.0;    // D eps(v) : eps(v)
  double diss_hyper = 0.0;     // mu |grad^2 v|^p
  double diss_maxwell = 0.0;   // R |dev phi'(E)|^2   resp.  G_M |Pi|^2
  double diss_pi_grad = 0.0;   // nu |grad Pi|^q
  double diss_eps0 = 0.0;      // eps |v|^p
  double diss_delta_grad = 0.0;  // monotone pairing of the delta-Laplacians

  double gravity_power = 0.0;  // sum rho g . v h^d

  /// [KE+SE]^k - [KE+SE]^{k-1} + tau * (sum diss) - tau * gravity_power;
  /// <= slack_budget for an accepted step.
  double inequality_slack = 0.0;
  double slack_budget = 0.0;

  double mass = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double min_J = 0.0;       // large model only
  double jac_drift = 0.0;   // ||J - det F||_inf, large model only

  double total_dissipation() const {
    return diss_stokes + diss_hyper + diss_maxwell + diss_pi_grad + diss_eps0 +
           diss_delta_grad;
  }
};

}  // namespace eulervisc
