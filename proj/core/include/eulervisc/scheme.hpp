// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <string>
#include <vector>

#include "eulervisc/materials.hpp"

namespace eulervisc {

/// Discretization and regularization parameters shared by both steppers.
struct SchemeParams {
  double tau = 1e-3;    // time step, s
  double eps = 1e-6;    // 0-order velocity dissipation weight / Yosida parameter
  double delta = 1e-4;  // gradient-regularization weight
  double mu = 1e-4;     // hyperviscosity coefficient
  double p_exp = 4.0;   // hyperviscosity exponent (> 3)
  double q_exp = 4.0;   // inelastic-gradient exponent (> 3 when nu > 0)
  double r_exp = 4.0;   // density-gradient exponent (> 3)
  double rho_max = 0.0; // cut-off threshold; 0 = derive as 4 * max(rho0)
  double K_V = 1.0;     // Stokes bulk viscosity, Pa s
  double G_V = 1.0;     // Stokes shear viscosity, Pa s
  double R = 0.0;       // reciprocal Maxwell modulus 1/G_M; 0 = Kelvin-Voigt
  double nu = 0.0;      // inelastic distortion-rate gradient coefficient

  RegularizationMode reg_mode = RegularizationMode::FullProx;

  // nonlinear solver
  double newton_tol_rel = 1e-10;
  double newton_tol_abs = 1e-12;  // times the residual scale
  int newton_max_iter = 50;
  int max_tau_halvings = 4;
  int gmres_restart = 60;
  int gmres_max_iter = 400;
  double gmres_tol = 1e-3;  // forcing term, relative to current residual

  double pi_solve_tol = 1e-12;
  int pi_solve_max_iter = 60;

  bool unsafe_override = false;

  /// Validation against the scheme hypotheses; returns every violation, each
  /// naming the assumption it encodes.  `large_model` adds the q-exponent
  /// hypothesis.
  std::vector<std::string> validate(bool large_model) const;

  /// Throws ValidationError unless violations are overridden.
  void require_valid(bool large_model) const;
};

/// The cut-off of the regularized mass flux: 1 on [0, rho_max], 0 outside
/// [0, rho_max + 1], C1 monotone in the band (rho_max, rho_max + 1).
double cutoff_K(double rho, double rho_max);
/// rho -> K(rho) * rho (Lipschitz despite the jump of K at 0).
double cutoff_K_rho(double rho, double rho_max);
/// A Lipschitz constant of cutoff_K_rho on the real line.
double cutoff_K_rho_lipschitz(double rho_max);

}  // namespace eulervisc
