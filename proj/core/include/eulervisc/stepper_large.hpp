// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <optional>
#include <vector>

#include "eulervisc/energy_report.hpp"
#include "eulervisc/newton.hpp"
#include "eulervisc/operators.hpp"
#include "eulervisc/scheme.hpp"
#include "eulervisc/stepper_small.hpp"  // GravityFn, gravity_field

namespace eulervisc {

/// Grid state of the finite-strain model: (rho, p, F, J, Pi) plus the optional
/// auxiliary H with its calibration.  J is an independent unknown; J = det F
/// holds only at t = 0 and its drift is a monitored diagnostic.
struct StateLarge {
  Field<double> rho;
  Field<Vec3> p_mom;
  Field<Tensor3> F;
  Field<double> J;
  Field<DevTensor3> Pi;
  Field<Tensor3> H;  // meaningful iff has_H
  bool has_H = false;
  HCalibration calibration = HCalibration::None;
  double time = 0.0;

  StateLarge() = default;
  explicit StateLarge(const Grid& g)
      : rho(g, 1.0), p_mom(g), F(g, Tensor3::identity()), J(g, 1.0), Pi(g), H(g) {}
  const Grid& grid() const { return rho.grid(); }
};

/// J = det F0, p = rho0 v0, H per the material's calibration; requires
/// det F0 > 0 everywhere.
StateLarge make_initial_large(const Field<double>& rho0, const Field<Vec3>& v0,
                              const Field<Tensor3>& F0, HCalibration calibration,
                              double alpha = 0.0);

/// Quasi-static inelastic flow rule:
///   G_M Pi = div(nu |grad Pi|^{q-2} grad Pi) - M,   (n.grad)Pi = 0,
/// solved as the strictly convex minimization it is the optimality system of.
/// nu = 0 reduces pointwise to Pi = -dev(M)/G_M on the same code path the
/// tests pin bitwise.
Field<DevTensor3> solve_pi(const Field<Tensor3>& M, double nu, double q_exp,
                           double G_M, double tol = 1e-12, int max_iter = 60);

struct LargeStepRecord {
  double tau = 0.0;
  SolveStats stats;
  EnergyReport report;
  int outer_sweeps = 0;
  bool cap_active = false;
};

/// One accepted step of the recursive regularized scheme (a)-(e), Pi and H
/// resolved per outer iterate (block Gauss-Seidel), with internal tau-halving
/// on failure.
StateLarge step_large(const StateLarge& old, const YosidaRegularizedEnergy& mat,
                      const SchemeParams& par, const GravityFn& gravity,
                      std::vector<LargeStepRecord>* records = nullptr);

/// Single-cell kinematic residuals for the backward-Euler updates of F, J and
/// H under a prescribed velocity gradient (the 0-D reductions used by the
/// oracle tests).
Tensor3 kinematic_residual_F(const Tensor3& Fk, const Tensor3& Fprev, double tau,
                             const Tensor3& grad_v, const DevTensor3& Pi);
double kinematic_residual_J(double Jk, double Jprev, double tau, double div_v);
Tensor3 kinematic_residual_H(const Tensor3& Hk, const Tensor3& Hprev, double tau,
                             const Tensor3& grad_v, const DevTensor3& Pi,
                             const Tensor3& Fk, double Jk,
                             HCalibration calibration, double alpha);

}  // namespace eulervisc
