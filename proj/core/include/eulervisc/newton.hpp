// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <functional>
#include <vector>

#include "eulervisc/error.hpp"

namespace eulervisc {

using DVec = std::vector<double>;

/// Residual evaluation; returns false when x is outside the domain of
/// definition (e.g. nonpositive density inside an iteration), which the
/// solver treats as a rejected probe rather than an abort.
using ResidualFn = std::function<bool(const DVec&, DVec&)>;

struct SolveStats {
  bool converged = false;
  int newton_iters = 0;
  int krylov_iters = 0;
  int damping_events = 0;
  int picard_sweeps = 0;
  int tau_halvings = 0;   // filled by the steppers
  double residual0 = 0.0;
  double residual = 0.0;
  double tol_used = 0.0;
  // filled by the steppers for the audit
  double energy_slack_budget = 0.0;
  double dissipation[8] = {0, 0, 0, 0, 0, 0, 0, 0};
};

struct NewtonOptions {
  double tol_rel = 1e-10;
  double tol_abs = 1e-12;
  double scale_hint = 1.0;  // multiplies tol_abs
  int max_iter = 50;
  int gmres_restart = 60;
  int gmres_max_iter = 400;
  double forcing = 1e-3;  // linear-solve tolerance relative to current residual
  std::function<bool(const DVec&)> feasible;  // optional domain guard
};

/// Damped inexact Newton with restarted matrix-free GMRES and Armijo
/// backtracking on |r|^2; falls back to damped Richardson sweeps before
/// giving up.  Throws SolverError when no progress can be made (the steppers
/// then halve tau and retry).
SolveStats newton_krylov(const ResidualFn& f, DVec& x, const NewtonOptions& opt);

}  // namespace eulervisc
