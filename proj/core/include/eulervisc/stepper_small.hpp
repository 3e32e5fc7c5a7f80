// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <functional>
#include <vector>

#include "eulervisc/energy_report.hpp"
#include "eulervisc/newton.hpp"
#include "eulervisc/operators.hpp"
#include "eulervisc/scheme.hpp"

namespace eulervisc {

/// Grid state of the linearized convective model: density, linear momentum,
/// and the symmetric elastic strain.  v = p/rho is eliminated.
struct StateSmall {
  Field<double> rho;
  Field<Vec3> p_mom;
  Field<SymTensor3> E;
  double time = 0.0;

  StateSmall() = default;
  explicit StateSmall(const Grid& g) : rho(g, 1.0), p_mom(g), E(g), time(0.0) {}
  const Grid& grid() const { return rho.grid(); }
};

/// Gravity acceleration g(t, x); the stepper applies midpoint quadrature for
/// the per-step time average.
using GravityFn = std::function<Vec3(double, const Vec3&)>;

Field<Vec3> gravity_field(const Grid& g, const GravityFn& fn, double t);

struct SmallStepRecord {
  double tau = 0.0;
  SolveStats stats;
  EnergyReport report;
};

/// Residual of the regularized backward-Euler system (a)-(c) for the packed
/// candidate state x = (rho, p, E) per cell; returns false when x leaves the
/// domain (nonpositive density).  Residual rows are scaled by tau over the
/// per-field scales recorded in `scales` (rho, p, E).
bool residual_small(const DVec& x, const StateSmall& old,
                    const IsotropicQuadraticEnergy& mat, const SchemeParams& par,
                    double tau, const Field<Vec3>& g_mid, const double* scales,
                    DVec& out);

/// One accepted step of size par.tau (internally halving on solver failure,
/// up to par.max_tau_halvings).  Appends one record per accepted substep.
StateSmall step_small(const StateSmall& old, const IsotropicQuadraticEnergy& mat,
                      const SchemeParams& par, const GravityFn& gravity,
                      std::vector<SmallStepRecord>* records = nullptr);

/// Packing helpers shared with the tests (layout: rho, p, E per cell).
void pack_state_small(const StateSmall& s, DVec& x);
void unpack_state_small(const DVec& x, StateSmall& s);

}  // namespace eulervisc
