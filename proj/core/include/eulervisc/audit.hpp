// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <string>
#include <vector>

#include "eulervisc/stepper_large.hpp"
#include "eulervisc/stepper_small.hpp"

namespace eulervisc {

// Conservation, positivity and energy-dissipation diagnostics.  Every
// quadrature here uses the steppers' stencils, so recomputing a report from
// two snapshots reproduces the stepper-embedded values.

double mass(const StateSmall& s);
double mass(const StateLarge& s);

struct DensityBounds {
  double min_rho;
  double max_rho;
};
DensityBounds density_bounds(const StateSmall& s);
DensityBounds density_bounds(const StateLarge& s);

/// ||J - det F||_inf.
double jacobian_drift(const StateLarge& s);
double min_jacobian(const StateLarge& s);

EnergyReport energy_report_small(const StateSmall& oldst, const StateSmall& newst,
                                 const IsotropicQuadraticEnergy& mat,
                                 const SchemeParams& par, double tau,
                                 const Field<Vec3>& g_mid);

EnergyReport energy_report_large(const StateLarge& oldst, const StateLarge& newst,
                                 const YosidaRegularizedEnergy& mat,
                                 const SchemeParams& par, double tau,
                                 const Field<Vec3>& g_mid);

/// CSV time series, one row per accepted substep; documented header line.
std::string audit_csv_header();
std::string audit_csv_row(const EnergyReport& r);

/// Self-convergence study: runs the provided propagator for each tau over the
/// same final time and measures state errors against the finest-tau run.
struct ConvergenceResult {
  std::vector<double> taus;     // coarse to fine, the finest is the reference
  std::vector<double> errors;   // one per non-reference tau, state l2 norm
  std::vector<double> orders;   // log2(e_i / e_{i+1})
};

/// Generic driver: `run(tau)` must integrate from the same initial state to
/// the same final time and return the packed final state.
ConvergenceResult convergence_study(const std::vector<double>& taus,
                                    const std::function<DVec(double)>& run);

}  // namespace eulervisc
