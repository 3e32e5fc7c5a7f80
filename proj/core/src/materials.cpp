// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/materials.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

namespace eulervisc {

namespace {

double packed_norm(const double* x, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

/// Unpivoted dense Cholesky solve (SPD A, row-major, destroyed).  Pivot-free
/// so that a trailing decoupled block cannot perturb the leading one.
bool chol_solve(int n, std::vector<double>& A, std::vector<double>& b) {
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = A[i * n + j];
      for (int k = 0; k < i; ++k) s -= A[i * n + k] * A[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        A[i * n + i] = std::sqrt(s);
      } else {
        A[j * n + i] = s / A[i * n + i];
      }
    }
  }
  for (int i = 0; i < n; ++i) {  // L y = b
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= A[i * n + k] * b[k];
    b[i] = s / A[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {  // L^T x = y
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= A[k * n + i] * b[k];
    b[i] = s / A[i * n + i];
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// PolyconvexEnergy defaults

void PolyconvexEnergy::hessian(const double* x, double* hess) const {
  const int n = ndof();
  std::vector<double> gp(n), gm(n), xp(x, x + n);
  for (int i = 0; i < n; ++i) {
    double h = 1e-6 * (1.0 + std::abs(x[i]));
    if (i == 9) h = std::min(h, 0.45 * x[9]);  // keep J positive
    xp[i] = x[i] + h;
    eval(xp.data(), gp.data());
    xp[i] = x[i] - h;
    eval(xp.data(), gm.data());
    xp[i] = x[i];
    for (int j = 0; j < n; ++j) hess[i * n + j] = (gp[j] - gm[j]) / (2.0 * h);
  }
  for (int i = 0; i < n; ++i)  // symmetrize
    for (int j = i + 1; j < n; ++j) {
      const double s = 0.5 * (hess[i * n + j] + hess[j * n + i]);
      hess[i * n + j] = hess[j * n + i] = s;
    }
}

double PolyconvexEnergy::smooth_eval(const double*, double*) const {
  throw DomainError(name() + ": simplified-cap regularization unsupported");
}
double PolyconvexEnergy::singular(double) const {
  throw DomainError(name() + ": simplified-cap regularization unsupported");
}
double PolyconvexEnergy::singular_prime(double) const {
  throw DomainError(name() + ": simplified-cap regularization unsupported");
}

// ---------------------------------------------------------------------------
// NeoHookean

NeoHookean::NeoHookean(double K, double G, double e, Singular v, double kap)
    : K_E(K), G_E(G), eps_reg(e < 0.0 ? 1e-3 * K : e), kappa(kap), variant(v) {
  if (!(K_E > 0.0) || !(G_E > 0.0))
    throw DomainError("NeoHookean: K_E and G_E must be > 0");
  if (variant == Singular::InversePower && !(kappa >= 1.0))
    throw DomainError("NeoHookean: inverse-power kappa must be >= 1");
}

double NeoHookean::eval(const double* x, double* grad) const {
  const double J = x[9];
  if (!(J > 0.0)) {
    if (grad) std::memset(grad, 0, sizeof(double) * 10);
    return HUGE_VAL;
  }
  double f2 = 0.0;
  for (int i = 0; i < 9; ++i) f2 += x[i] * x[i];
  const double jm23 = std::pow(J, -2.0 / 3.0);
  const double vol = J - 1.0 + eps_reg / K_E;
  double sv, svp;
  if (variant == Singular::Log) {
    sv = -eps_reg * std::log(J);
    svp = -eps_reg / J;
  } else {
    sv = eps_reg * std::pow(J, -kappa);
    svp = -kappa * eps_reg * std::pow(J, -kappa - 1.0);
  }
  const double val = 0.5 * K_E * vol * vol + G_E * jm23 * f2 + sv;
  if (grad) {
    const double cf = 2.0 * G_E * jm23;
    for (int i = 0; i < 9; ++i) grad[i] = cf * x[i];
    grad[9] = K_E * vol - (2.0 / 3.0) * G_E * std::pow(J, -5.0 / 3.0) * f2 + svp;
  }
  return val;
}

void NeoHookean::hessian(const double* x, double* hess) const {
  const double J = x[9];
  if (!(J > 0.0)) throw DomainError("NeoHookean::hessian: J must be > 0");
  double f2 = 0.0;
  for (int i = 0; i < 9; ++i) f2 += x[i] * x[i];
  double svpp;
  if (variant == Singular::Log)
    svpp = eps_reg / (J * J);
  else
    svpp = kappa * (kappa + 1.0) * eps_reg * std::pow(J, -kappa - 2.0);
  std::memset(hess, 0, sizeof(double) * 100);
  const double jm23 = std::pow(J, -2.0 / 3.0);
  const double jm53 = std::pow(J, -5.0 / 3.0);
  const double jm83 = std::pow(J, -8.0 / 3.0);
  for (int i = 0; i < 9; ++i) {
    hess[i * 10 + i] = 2.0 * G_E * jm23;
    hess[i * 10 + 9] = hess[9 * 10 + i] = -(4.0 / 3.0) * G_E * jm53 * x[i];
  }
  hess[99] = K_E + (10.0 / 9.0) * G_E * jm83 * f2 + svpp;
}

// ---------------------------------------------------------------------------
// MooneyRivlin

MooneyRivlin::MooneyRivlin(double K, double G, double Gmr, double e,
                           NeoHookean::Singular v, double kap)
    : base(K, G, e, v, kap), G_MR(Gmr) {
  if (G_MR < 0.0) throw DomainError("MooneyRivlin: G_MR must be >= 0");
}

double MooneyRivlin::eval(const double* x, double* grad) const {
  double val = base.eval(x, grad);
  double h2 = 0.0;
  for (int i = 10; i < 19; ++i) h2 += x[i] * x[i];
  val += G_MR * h2;
  if (grad)
    for (int i = 10; i < 19; ++i) grad[i] = 2.0 * G_MR * x[i];
  return val;
}

void MooneyRivlin::hessian(const double* x, double* hess) const {
  std::memset(hess, 0, sizeof(double) * 19 * 19);
  std::vector<double> hb(100);
  base.hessian(x, hb.data());
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) hess[i * 19 + j] = hb[i * 10 + j];
  for (int i = 10; i < 19; ++i) hess[i * 19 + i] = 2.0 * G_MR;
}

// ---------------------------------------------------------------------------
// ReferentialNeoHookean (H = J^{-5/6} F)

ReferentialNeoHookean::ReferentialNeoHookean(double K, double G) : K_E(K), G_E(G) {
  if (!(K_E > 0.0) || !(G_E > 0.0))
    throw DomainError("ReferentialNeoHookean: K_E and G_E must be > 0");
}

double ReferentialNeoHookean::eval(const double* x, double* grad) const {
  const double J = x[9];
  if (!(J > 0.0)) {
    if (grad) std::memset(grad, 0, sizeof(double) * 19);
    return HUGE_VAL;
  }
  double val = smooth_eval(x, grad) + singular(J);
  if (grad) grad[9] += singular_prime(J);
  return val;
}

double ReferentialNeoHookean::smooth_eval(const double* x, double* grad) const {
  double h2 = 0.0;
  for (int i = 10; i < 19; ++i) h2 += x[i] * x[i];
  if (grad) {
    std::memset(grad, 0, sizeof(double) * 19);
    for (int i = 10; i < 19; ++i) grad[i] = 2.0 * G_E * x[i];
  }
  return G_E * h2;
}

double ReferentialNeoHookean::singular(double J) const {
  return 0.5 * K_E * (J - 2.0 + 1.0 / J);
}
double ReferentialNeoHookean::singular_prime(double J) const {
  return 0.5 * K_E * (1.0 - 1.0 / (J * J));
}

void ReferentialNeoHookean::hessian(const double* x, double* hess) const {
  const double J = x[9];
  if (!(J > 0.0)) throw DomainError("ReferentialNeoHookean::hessian: J must be > 0");
  std::memset(hess, 0, sizeof(double) * 19 * 19);
  hess[9 * 19 + 9] = K_E / (J * J * J);
  for (int i = 10; i < 19; ++i) hess[i * 19 + i] = 2.0 * G_E;
}

// ---------------------------------------------------------------------------
// BarotropicFluid

BarotropicFluid::BarotropicFluid(double a_, double gamma_) : a(a_), gamma(gamma_) {
  if (!(a > 0.0)) throw DomainError("BarotropicFluid: a must be > 0");
  if (!(gamma > 1.0)) throw DomainError("BarotropicFluid: gamma must be > 1");
}

double BarotropicFluid::eval(const double* x, double* grad) const {
  const double J = x[9];
  if (!(J > 0.0)) {
    if (grad) std::memset(grad, 0, sizeof(double) * 10);
    return HUGE_VAL;
  }
  if (grad) {
    std::memset(grad, 0, sizeof(double) * 10);
    grad[9] = singular_prime(J);
  }
  return singular(J);
}

double BarotropicFluid::smooth_eval(const double*, double* grad) const {
  if (grad) std::memset(grad, 0, sizeof(double) * 10);
  return 0.0;
}
double BarotropicFluid::singular(double J) const {
  return a / (gamma - 1.0) * std::pow(J, -gamma);
}
double BarotropicFluid::singular_prime(double J) const {
  return -a * gamma / (gamma - 1.0) * std::pow(J, -gamma - 1.0);
}

void BarotropicFluid::hessian(const double* x, double* hess) const {
  const double J = x[9];
  if (!(J > 0.0)) throw DomainError("BarotropicFluid::hessian: J must be > 0");
  std::memset(hess, 0, sizeof(double) * 100);
  hess[99] = a * gamma * (gamma + 1.0) / (gamma - 1.0) * std::pow(J, -gamma - 2.0);
}

// ---------------------------------------------------------------------------
// FJPowerEnergy

double FJPowerEnergy::eval(const double* x, double* grad) const {
  const double J = x[9];
  if (!(J > 0.0)) {
    if (grad) std::memset(grad, 0, sizeof(double) * 10);
    return HUGE_VAL;
  }
  double f2 = 0.0;
  for (int i = 0; i < 9; ++i) f2 += x[i] * x[i];
  const double jmp = std::pow(J, -pw);
  if (grad) {
    for (int i = 0; i < 9; ++i) grad[i] = 2.0 * jmp * x[i];
    grad[9] = -pw * f2 * std::pow(J, -pw - 1.0);
  }
  return f2 * jmp;
}

void FJPowerEnergy::hessian(const double* x, double* hess) const {
  const double J = x[9];
  if (!(J > 0.0)) throw DomainError("FJPowerEnergy::hessian: J must be > 0");
  double f2 = 0.0;
  for (int i = 0; i < 9; ++i) f2 += x[i] * x[i];
  std::memset(hess, 0, sizeof(double) * 100);
  for (int i = 0; i < 9; ++i) {
    hess[i * 10 + i] = 2.0 * std::pow(J, -pw);
    hess[i * 10 + 9] = hess[9 * 10 + i] = -2.0 * pw * std::pow(J, -pw - 1.0) * x[i];
  }
  hess[99] = pw * (pw + 1.0) * f2 * std::pow(J, -pw - 2.0);
}

// ---------------------------------------------------------------------------
// Yosida / simplified-cap regularization

YosidaRegularizedEnergy::YosidaRegularizedEnergy(
    std::shared_ptr<const PolyconvexEnergy> base, double eps, double delta,
    RegularizationMode mode)
    : base_(std::move(base)), eps_(eps), delta_(delta), mode_(mode) {
  if (mode_ == RegularizationMode::FullProx && !(eps_ > 0.0))
    throw DomainError("YosidaRegularizedEnergy: full-prox mode needs eps > 0");
  if (delta_ < 0.0) throw DomainError("YosidaRegularizedEnergy: delta must be >= 0");
  if (mode_ == RegularizationMode::SimpleCap && !base_->supports_simple_cap())
    throw DomainError("YosidaRegularizedEnergy: base energy has no smooth/singular split");
}

void YosidaRegularizedEnergy::prox_solve(const double* x, double* y) const {
  const int n = base_->ndof();
  const double xnorm = packed_norm(x, n);
  // Official stop from the scheme design; the floor keeps polishing to the
  // round-off limit of the gradient evaluation, which costs one or two extra
  // quadratic-convergence iterations.
  const double tol_official = 1e-12 * (1.0 + xnorm / eps_);
  const double tol_floor = 8.0 * 3e-16 * (1.0 + xnorm) / eps_;

  bool warm_ok = std::isfinite(y[0]) && y[9] > 0.0;
  for (int i = 0; i < n && warm_ok; ++i) warm_ok = std::isfinite(y[i]);
  if (!warm_ok) {
    std::memcpy(y, x, sizeof(double) * n);
    if (!(y[9] > 0.0)) y[9] = 0.05 * (1.0 + std::abs(x[9]));
  }

  std::vector<double> g(n), gb(n), H(n * n), step(n), ytrial(n);
  double val = base_->eval(y, gb.data());
  if (!std::isfinite(val)) {  // fallback interior start
    std::memcpy(y, x, sizeof(double) * n);
    y[9] = std::max(0.05, x[9]);
    val = base_->eval(y, gb.data());
    if (!std::isfinite(val))
      throw SolverError("yosida prox: no finite starting point");
  }
  auto objective = [&](const double* yy, double base_val) {
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += (yy[i] - x[i]) * (yy[i] - x[i]);
    return base_val + 0.5 * q / eps_;
  };
  double phi = objective(y, val);

  double prev_gn = HUGE_VAL;
  for (int iter = 0; iter < 100; ++iter) {
    double gn = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] = gb[i] + (y[i] - x[i]) / eps_;
      gn += g[i] * g[i];
    }
    gn = std::sqrt(gn);
    if (gn <= tol_floor) return;
    if (gn <= tol_official && gn > 0.33 * prev_gn) return;  // stalled within tol
    prev_gn = gn;

    base_->hessian(y, H.data());
    for (int i = 0; i < n; ++i) H[i * n + i] += 1.0 / eps_;
    std::vector<double> A = H;
    step = g;
    if (!chol_solve(n, A, step)) {
      A = H;
      for (int i = 0; i < n; ++i) A[i * n + i] += 1e-10 * (1.0 + H[i * n + i]);
      step = g;
      if (!chol_solve(n, A, step))
        throw SolverError("yosida prox: indefinite inner Hessian");
    }
    double gs = 0.0;
    for (int i = 0; i < n; ++i) gs += g[i] * step[i];

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i < n; ++i) ytrial[i] = y[i] - t * step[i];
      const double bv = base_->eval(ytrial.data(), gb.data());
      if (std::isfinite(bv)) {
        const double pt = objective(ytrial.data(), bv);
        if (pt <= phi - 1e-4 * t * gs) {
          std::memcpy(y, ytrial.data(), sizeof(double) * n);
          val = bv;
          phi = pt;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (gn <= tol_official) return;
      throw SolverError("yosida prox: line search failed (non-convex base energy?)");
    }
  }
  // max inner iterations reached
  double gn = 0.0;
  for (int i = 0; i < n; ++i) {
    const double gi = gb[i] + (y[i] - x[i]) / eps_;
    gn += gi * gi;
  }
  if (std::sqrt(gn) > tol_official)
    throw SolverError("yosida prox: no convergence after max inner iterations");
}

EnergyDerivs YosidaRegularizedEnergy::eval(const Tensor3& F, const Tensor3& H,
                                           double J, double* warm) const {
  const int n = base_->ndof();
  double x[19];
  base_->pack(F, H, J, x);
  double grad[19] = {0.0};
  double val = 0.0;

  if (mode_ == RegularizationMode::Direct) {
    val = base_->eval(x, grad);
  } else if (mode_ == RegularizationMode::SimpleCap) {
    val = base_->smooth_eval(x, grad);
    if (J >= j_floor_) {
      val += base_->singular(J);
      grad[9] += base_->singular_prime(J);
    } else {
      cap_active_.store(true, std::memory_order_relaxed);
      const double s0 = base_->singular(j_floor_);
      const double s1 = base_->singular_prime(j_floor_);
      val += s0 + s1 * (J - j_floor_);
      grad[9] += s1;
    }
  } else {  // FullProx
    double ybuf[19];
    double* y = warm ? warm : ybuf;
    if (!warm) std::memcpy(ybuf, x, sizeof(double) * n);
    prox_solve(x, y);
    // Envelope derivative: [Y_eps phi]'(x) = (x - prox)/eps = phi'(prox);
    // evaluating phi' at the prox avoids the cancellation in (x-prox)/eps.
    val = base_->eval(y, grad);
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += (y[i] - x[i]) * (y[i] - x[i]);
    val += 0.5 * q / eps_;
  }

  if (delta_ > 0.0) {
    const double sd = std::sqrt(delta_);
    double q = 0.0;
    for (int i = 0; i < n; ++i) {
      q += x[i] * x[i];
      grad[i] += sd * x[i];
    }
    val += 0.5 * sd * q;
  }

  EnergyDerivs d;
  d.value = val;
  for (int i = 0; i < 9; ++i) d.dF.e[i] = grad[i];
  d.dJ = grad[9];
  if (base_->has_H())
    for (int i = 0; i < 9; ++i) d.dH.e[i] = grad[10 + i];
  return d;
}

double YosidaRegularizedEnergy::value(const double* x, double* warm) const {
  Tensor3 F, H;
  for (int i = 0; i < 9; ++i) F.e[i] = x[i];
  if (base_->has_H())
    for (int i = 0; i < 9; ++i) H.e[i] = x[10 + i];
  return eval(F, H, x[9], warm).value;
}

// ---------------------------------------------------------------------------
// Stress mappings

StressPair stress_pair(const YosidaRegularizedEnergy& re, const Tensor3& F,
                       const Tensor3& H, double J, double* warm) {
  const EnergyDerivs d = re.eval(F, H, J, warm);
  return stress_from_derivs(re.base().calibration(), re.base().alpha(), d, F, H, J);
}

StressPair stress_from_derivs(HCalibration cal, double alpha, const EnergyDerivs& d,
                              const Tensor3& F, const Tensor3& H, double J) {
  const Tensor3 I = Tensor3::identity();
  StressPair out;
  switch (cal) {
    case HCalibration::None: {
      out.T = d.dF * F.transposed() + (J * d.dJ + d.value) * I;
      out.M = dev(F.transposed() * d.dF);
      break;
    }
    case HCalibration::CofF: {
      const Tensor3 P = d.dF + cof_prime(F, d.dH);
      out.T = P * F.transposed() + (J * d.dJ + d.value) * I;
      out.M = dev(F.transposed() * P);
      break;
    }
    case HCalibration::PowerJTimesF: {
      out.T = d.dF * F.transposed() + d.dH * H.transposed() +
              (J * d.dJ + alpha * ddot(d.dH, H) + d.value) * I;
      out.M = dev(F.transposed() * d.dF + H.transposed() * d.dH);
      break;
    }
    case HCalibration::MooneyRivlinCof: {
      const double c = std::pow(J, -7.0 / 6.0);
      const Tensor3 A = c * cof_prime(F, d.dH);
      out.T = (d.dF + A) * F.transposed() +
              (J * d.dJ - (7.0 / 6.0) * ddot(d.dH, H) + d.value) * I;
      out.M = dev(F.transposed() * (d.dF + A));
      break;
    }
  }
  return out;
}

Tensor3 stress_T(const YosidaRegularizedEnergy& re, const Tensor3& F,
                 const Tensor3& H, double J) {
  return stress_pair(re, F, H, J).T;
}
Tensor3 stress_M(const YosidaRegularizedEnergy& re, const Tensor3& F,
                 const Tensor3& H, double J) {
  return stress_pair(re, F, H, J).M;
}

// ---------------------------------------------------------------------------
// Referential conversion

Tensor3 cauchy_from_referential(const ReferentialEnergy& psi, const Tensor3& F) {
  const double J = det(F);
  if (!(J > 0.0))
    throw DomainError("cauchy_from_referential: det F must be > 0");
  return psi.deriv(F) * F.transposed() * (1.0 / J);
}

Tensor3 mandel_from_referential(const ReferentialEnergy& psi, const Tensor3& F) {
  const double J = det(F);
  if (!(J > 0.0))
    throw DomainError("mandel_from_referential: det F must be > 0");
  return dev(F.transposed() * psi.deriv(F) * (1.0 / J));
}

// ---------------------------------------------------------------------------
// Convexity identities

namespace {

Eigen::Matrix4d kinetic_hessian(const Vec3& p, double rho) {
  if (!(rho > 0.0)) throw DomainError("kinetic hessian: density must be > 0");
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 3; ++i) {
    h(i, i) = 1.0 / rho;
    h(i, 3) = h(3, i) = -p[i] / (rho * rho);
  }
  h(3, 3) = p.norm2() / (rho * rho * rho);
  return h;
}

}  // namespace

double kinetic_hessian_det(const Vec3& p, double rho) {
  return kinetic_hessian(p, rho).determinant();
}

double kinetic_hessian_min_eig(const Vec3& p, double rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(kinetic_hessian(p, rho));
  return es.eigenvalues().minCoeff();
}

bool kinetic_hessian_psd(const Vec3& p, double rho, double tol) {
  return kinetic_hessian_min_eig(p, rho) >= -tol * (1.0 / rho);
}

double fj_power_hessian_det(const Tensor3& F, double J, double pw) {
  if (!(J > 0.0)) throw DomainError("fj_power_hessian_det: J must be > 0");
  return 512.0 * pw * (1.0 - pw) * std::pow(J, -10.0 * pw - 2.0) * F.norm2();
}

double fj_power_hessian_det_numeric(const Tensor3& F, double J, double pw) {
  if (!(J > 0.0)) throw DomainError("fj_power_hessian_det_numeric: J must be > 0");
  const FJPowerEnergy e(pw);
  double x[10];
  e.pack(F, Tensor3{}, J, x);
  std::vector<double> h(100);
  e.PolyconvexEnergy::hessian(x, h.data());  // central differences of the gradient
  Eigen::MatrixXd m(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) m(i, j) = h[i * 10 + j];
  return m.determinant();
}

ConvexityReport convexity_probe(const PolyconvexEnergy& e, double f_box,
                                double j_lo, double j_hi, int n_samples,
                                unsigned seed, double rel_tol) {
  if (!(j_lo > 0.0)) throw DomainError("convexity_probe: J floor must be > 0");
  const int n = e.ndof();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> uj(j_lo, j_hi);
  std::uniform_real_distribution<double> uq(0.6, 1.2);

  ConvexityReport rep;
  rep.min_eig = HUGE_VAL;
  std::vector<double> h(n * n);
  Eigen::MatrixXd m(n, n);
  double worst_ratio = HUGE_VAL;
  for (int s = 0; s < n_samples; ++s) {
    Tensor3 F = Tensor3::identity() * uq(rng);
    for (int i = 0; i < 9; ++i) F.e[i] += 0.4 * f_box * uni(rng);
    Tensor3 H = Tensor3::identity() * uq(rng);
    for (int i = 0; i < 9; ++i) H.e[i] += 0.4 * f_box * uni(rng);
    const double J = uj(rng);

    double x[19];
    e.pack(F, H, J, x);
    if (!std::isfinite(e.eval(x, nullptr))) continue;
    e.hessian(x, h.data());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = 0.5 * (h[i * n + j] + h[j * n + i]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double lam = es.eigenvalues().minCoeff();
    const double scale = m.norm();
    const double ratio = scale > 0.0 ? lam / scale : 0.0;
    ++rep.samples;
    if (ratio < worst_ratio) {
      worst_ratio = ratio;
      rep.min_eig = lam;
      rep.min_eig_scale = scale;
      rep.witness_F = F;
      rep.witness_H = H;
      rep.witness_J = J;
    }
    if (lam < -rel_tol * scale) rep.pass = false;
  }
  return rep;
}

std::shared_ptr<const PolyconvexEnergy> make_polyconvex(
    const std::string& name, double K_E, double G_E, double G_MR, double eps_reg,
    const std::string& singular_variant, double kappa, double a, double gamma,
    double pw) {
  const auto variant = singular_variant == "inverse-power"
                           ? NeoHookean::Singular::InversePower
                           : NeoHookean::Singular::Log;
  if (name == "neo-hookean")
    return std::make_shared<NeoHookean>(K_E, G_E, eps_reg, variant, kappa);
  if (name == "mooney-rivlin")
    return std::make_shared<MooneyRivlin>(K_E, G_E, G_MR, eps_reg, variant, kappa);
  if (name == "referential-neo-hookean")
    return std::make_shared<ReferentialNeoHookean>(K_E, G_E);
  if (name == "barotropic") return std::make_shared<BarotropicFluid>(a, gamma);
  if (name == "fj-power") return std::make_shared<FJPowerEnergy>(pw);
  throw DomainError("unknown material card: " + name);
}

}  // namespace eulervisc
