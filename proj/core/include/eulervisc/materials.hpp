// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "eulervisc/tensor.hpp"

namespace eulervisc {

// ---------------------------------------------------------------------------
// Small-strain isotropic quadratic energy
//   phi(E) = 3/2 K_E |sph E|^2 + G_E |dev E|^2,  phi' = 3 K_E sph E + 2 G_E dev E.

struct IsotropicQuadraticEnergy {
  double K_E;  // bulk modulus, Pa
  double G_E;  // shear modulus, Pa

  IsotropicQuadraticEnergy(double k, double g) : K_E(k), G_E(g) {
    if (!(K_E > 0.0) || !(G_E > 0.0))
      throw DomainError("IsotropicQuadraticEnergy: K_E and G_E must be > 0");
  }

  /// Strong-convexity constant: phi(E) >= alpha |E|^2.
  double alpha() const { return std::min(1.5 * K_E, G_E); }
};

/// The isotropic 4th-order action 3K sph(.) + 2G dev(.), shared by phi' and
/// the Stokes viscosity tensor D.
inline SymTensor3 isotropic4_apply(const SymTensor3& e, double K, double G) {
  return 3.0 * K * sph(e) + 2.0 * G * dev_sym(e);
}

inline double phi_small(const SymTensor3& E, const IsotropicQuadraticEnergy& m) {
  return 1.5 * m.K_E * sph(E).norm2() + m.G_E * dev_sym(E).norm2();
}

inline SymTensor3 dphi_small(const SymTensor3& E, const IsotropicQuadraticEnergy& m) {
  return isotropic4_apply(E, m.K_E, m.G_E);
}

/// Cauchy stress of the linearized convective model: T = phi'(E) + phi(E) I.
inline SymTensor3 cauchy_small(const SymTensor3& E, const IsotropicQuadraticEnergy& m) {
  SymTensor3 t = dphi_small(E, m);
  const double p = phi_small(E, m);
  t.e[SymTensor3::XX] += p;
  t.e[SymTensor3::YY] += p;
  t.e[SymTensor3::ZZ] += p;
  return t;
}

// ---------------------------------------------------------------------------
// Finite-strain energies phi(F) = phi_breve(F[, H], J).

/// Which auxiliary kinematic field H the convex representation uses.
enum class HCalibration {
  None,           // phi_breve(F, J)
  CofF,           // H = Cof F
  PowerJTimesF,   // H = J^alpha F   (recalibrated deformation gradient)
  MooneyRivlinCof // H = J^{-7/6} Cof F
};

/// Convex representation phi_breve of an actual-frame stored energy, with
/// first derivatives.  State is packed as x = (F row-major, J[, H row-major]);
/// ndof() is 10 without H and 19 with it.
class PolyconvexEnergy {
 public:
  virtual ~PolyconvexEnergy() = default;

  virtual HCalibration calibration() const { return HCalibration::None; }
  virtual double alpha() const { return 0.0; }  // exponent for PowerJTimesF
  bool has_H() const { return calibration() != HCalibration::None; }
  int ndof() const { return has_H() ? 19 : 10; }

  /// Value and gradient at packed x; +inf (HUGE_VAL) outside the domain.
  /// grad may be null.
  virtual double eval(const double* x, double* grad) const = 0;

  /// Dense Hessian (ndof x ndof, row-major).  Default: central differences of
  /// the analytic gradient.
  virtual void hessian(const double* x, double* hess) const;

  virtual bool admissible(const double* x) const { return x[9] > 0.0; }

  /// Simplified-cap split phi = f(F,H,J) + s(J) with f finite everywhere and
  /// s convex, singular at J -> 0+.  Only some energies support it.
  virtual bool supports_simple_cap() const { return false; }
  virtual double smooth_eval(const double* x, double* grad) const;
  virtual double singular(double J) const;
  virtual double singular_prime(double J) const;

  virtual std::string name() const = 0;

  // packing helpers
  void pack(const Tensor3& F, const Tensor3& H, double J, double* x) const {
    for (int i = 0; i < 9; ++i) x[i] = F.e[i];
    x[9] = J;
    if (has_H())
      for (int i = 0; i < 9; ++i) x[10 + i] = H.e[i];
  }
};

/// Neo-Hookean actual-frame energy (polyconvex representation in (F, J)):
///   phi_breve(F,J) = K_E/2 (J - 1 + eps_reg/K_E)^2 + G_E |F|^2 / J^{2/3} + eps_reg * s(J),
/// s(J) = ln(1/J) (log variant) or 1/J^kappa (inverse-power variant).
class NeoHookean : public PolyconvexEnergy {
 public:
  enum class Singular { Log, InversePower };

  NeoHookean(double K_E, double G_E, double eps_reg = -1.0,
             Singular variant = Singular::Log, double kappa = 2.0);

  double eval(const double* x, double* grad) const override;
  void hessian(const double* x, double* hess) const override;
  std::string name() const override { return "neo-hookean"; }

  double K_E, G_E, eps_reg, kappa;
  Singular variant;
};

/// Mooney-Rivlin: Neo-Hookean plus the actual-frame term G_MR |H|^2 with
/// H = J^{-7/6} Cof F.  Reduces exactly to NeoHookean when G_MR = 0.
class MooneyRivlin : public PolyconvexEnergy {
 public:
  MooneyRivlin(double K_E, double G_E, double G_MR, double eps_reg = -1.0,
               NeoHookean::Singular variant = NeoHookean::Singular::Log,
               double kappa = 2.0);

  HCalibration calibration() const override { return HCalibration::MooneyRivlinCof; }
  double eval(const double* x, double* grad) const override;
  void hessian(const double* x, double* hess) const override;
  std::string name() const override { return "mooney-rivlin"; }

  NeoHookean base;
  double G_MR;
};

/// Referential neo-Hookean cast on the recalibrated gradient H = J^{-5/6} F:
///   phi_breve(H,J) = G_E |H|^2 + K_E/2 (J - 2 + 1/J),
/// convex (strongly in H); supports the simplified cap on its singular part.
class ReferentialNeoHookean : public PolyconvexEnergy {
 public:
  ReferentialNeoHookean(double K_E, double G_E);

  HCalibration calibration() const override { return HCalibration::PowerJTimesF; }
  double alpha() const override { return -5.0 / 6.0; }
  double eval(const double* x, double* grad) const override;
  void hessian(const double* x, double* hess) const override;
  bool supports_simple_cap() const override { return true; }
  double smooth_eval(const double* x, double* grad) const override;
  double singular(double J) const override;
  double singular_prime(double J) const override;
  std::string name() const override { return "referential-neo-hookean"; }

  double K_E, G_E;
};

/// Barotropic fluid phi_breve(J) = a/(gamma-1) J^{-gamma} (referential density
/// normalized to 1), giving p = a rho^gamma and a purely spherical Cauchy
/// stress.
class BarotropicFluid : public PolyconvexEnergy {
 public:
  BarotropicFluid(double a, double gamma);

  double eval(const double* x, double* grad) const override;
  void hessian(const double* x, double* hess) const override;
  bool supports_simple_cap() const override { return true; }
  double smooth_eval(const double* x, double* grad) const override;
  double singular(double J) const override;
  double singular_prime(double J) const override;
  std::string name() const override { return "barotropic"; }

  double a, gamma;
};

/// The coupling kernel |F|^2 / J^pw of the neo-Hookean convexity analysis;
/// convex iff 0 <= pw <= 1.  Used by the convexity identities and probes.
class FJPowerEnergy : public PolyconvexEnergy {
 public:
  explicit FJPowerEnergy(double pw) : pw(pw) {}
  double eval(const double* x, double* grad) const override;
  void hessian(const double* x, double* hess) const override;
  std::string name() const override { return "fj-power"; }

  double pw;
};

// ---------------------------------------------------------------------------
// Yosida / simplified-cap regularization and the stress mappings.

enum class RegularizationMode { Direct, FullProx, SimpleCap };

struct EnergyDerivs {
  double value = 0.0;
  Tensor3 dF;
  Tensor3 dH;
  double dJ = 0.0;
};

/// phi_breve_{eps,delta} = Y_eps phi_breve + sqrt(delta)/2 (|F|^2 + J^2 [+ |H|^2]).
///
/// FullProx evaluates the Moreau/Yosida envelope by solving the strongly
/// convex inner minimization with damped Newton (derivative taken as
/// phi'(prox), the envelope identity).  SimpleCap keeps the smooth part and
/// replaces the singular s(J) below j_floor by its C1 linear extension.
/// Direct passes the base energy through (diagnostics; eps ignored).
class YosidaRegularizedEnergy {
 public:
  YosidaRegularizedEnergy(std::shared_ptr<const PolyconvexEnergy> base, double eps,
                          double delta, RegularizationMode mode);

  /// Evaluate value + gradient at (F, H, J).  `warm` (ndof doubles) carries the
  /// previous prox point for warm starting; may be null.
  EnergyDerivs eval(const Tensor3& F, const Tensor3& H, double J,
                    double* warm = nullptr) const;

  /// Envelope value only (packed input), for oracles.
  double value(const double* x, double* warm = nullptr) const;

  const PolyconvexEnergy& base() const { return *base_; }
  RegularizationMode mode() const { return mode_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }

  /// Cap threshold for SimpleCap; refreshed by the stepper (default 0.05).
  void set_j_floor(double j) const { j_floor_ = j; }
  double j_floor() const { return j_floor_; }

  /// True when the cap modified any evaluation since the last reset.
  bool cap_active() const { return cap_active_.load(std::memory_order_relaxed); }
  void reset_cap_flag() const { cap_active_.store(false, std::memory_order_relaxed); }

 private:
  void prox_solve(const double* x, double* y) const;

  std::shared_ptr<const PolyconvexEnergy> base_;
  double eps_, delta_;
  RegularizationMode mode_;
  mutable double j_floor_ = 0.05;
  mutable std::atomic<bool> cap_active_{false};
};

/// Cauchy / Mandel stress pair for the momentum equation and the inelastic
/// flow rule.  Assembled from the regularized energy gradient so that the
/// stress work pairs exactly with the discrete kinematic equations, including
/// the chain terms of the H-calibrations (Cof' F and the J^alpha variants).
struct StressPair {
  Tensor3 T;
  Tensor3 M;
};

StressPair stress_pair(const YosidaRegularizedEnergy& re, const Tensor3& F,
                       const Tensor3& H, double J, double* warm = nullptr);

/// Assembly from precomputed energy derivatives (the steppers evaluate the
/// regularized energy once per cell and reuse it here, in the transport and
/// in the dissipation quadratures).
StressPair stress_from_derivs(HCalibration cal, double alpha, const EnergyDerivs& d,
                              const Tensor3& F, const Tensor3& H, double J);

Tensor3 stress_T(const YosidaRegularizedEnergy& re, const Tensor3& F,
                 const Tensor3& H, double J);
Tensor3 stress_M(const YosidaRegularizedEnergy& re, const Tensor3& F,
                 const Tensor3& H, double J);

// ---------------------------------------------------------------------------
// Referential-frame conversion (psi = phi * det F).

struct ReferentialEnergy {
  virtual ~ReferentialEnergy() = default;
  virtual double value(const Tensor3& F) const = 0;
  virtual Tensor3 deriv(const Tensor3& F) const = 0;
};

/// T = psi'(F) F^T / det F; requires det F > 0.
Tensor3 cauchy_from_referential(const ReferentialEnergy& psi, const Tensor3& F);
/// M = dev(F^T psi'(F) / det F).
Tensor3 mandel_from_referential(const ReferentialEnergy& psi, const Tensor3& F);

// ---------------------------------------------------------------------------
// Convexity identities.

/// Determinant of the 4x4 Hessian of (p, rho) -> |p|^2/(2 rho); identically 0.
double kinetic_hessian_det(const Vec3& p, double rho);
/// Minimum eigenvalue of that Hessian (>= 0 up to round-off).
double kinetic_hessian_min_eig(const Vec3& p, double rho);
bool kinetic_hessian_psd(const Vec3& p, double rho, double tol = 1e-12);

/// Closed-form determinant of the 10x10 Hessian of |F|^2/J^pw:
///   2^9 pw (1-pw) J^{-10 pw - 2} |F|^2.
double fj_power_hessian_det(const Tensor3& F, double J, double pw);
/// Companion numeric path: assemble the 10x10 Hessian (central differences of
/// the analytic gradient) and return its dense determinant.
double fj_power_hessian_det_numeric(const Tensor3& F, double J, double pw);

/// Hessian sampling probe over a box |F| entries in [-f_box, f_box] (plus
/// identity offset), J in [j_lo, j_hi]; reports the worst eigenvalue found.
struct ConvexityReport {
  bool pass = true;
  double min_eig = 0.0;
  double min_eig_scale = 0.0;  // Frobenius norm of the Hessian at the witness
  Tensor3 witness_F;
  Tensor3 witness_H;
  double witness_J = 1.0;
  int samples = 0;
};

ConvexityReport convexity_probe(const PolyconvexEnergy& e, double f_box,
                                double j_lo, double j_hi, int n_samples,
                                unsigned seed = 1234, double rel_tol = 1e-6);

/// Factory for material cards ([material] section of run configs).
std::shared_ptr<const PolyconvexEnergy> make_polyconvex(
    const std::string& name, double K_E, double G_E, double G_MR, double eps_reg,
    const std::string& singular_variant, double kappa, double a, double gamma,
    double pw);

}  // namespace eulervisc
