// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/stepper_large.hpp"

#include <atomic>
#include <cmath>

#include "eulervisc/audit.hpp"
#include "eulervisc/util.hpp"

namespace eulervisc {

namespace {

constexpr BCTag kTv = BCTag::Impermeable;
constexpr BCTag kTs = BCTag::Neumann;

double max_abs(const Field<double>& f) {
  double m = 0.0;
  for (long i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}
double max_norm(const Field<Vec3>& f) {
  double m = 0.0;
  for (long i = 0; i < f.size(); ++i) m = std::max(m, f[i].norm());
  return m;
}
double max_norm(const Field<Tensor3>& f) {
  double m = 0.0;
  for (long i = 0; i < f.size(); ++i) m = std::max(m, f[i].norm());
  return m;
}

template <class V>
double field_l2(const Field<V>& f) {
  std::vector<double> t(f.size());
  for (long i = 0; i < f.size(); ++i) {
    if constexpr (std::is_same_v<V, double>)
      t[i] = f[i] * f[i];
    else
      t[i] = f[i].norm2();
  }
  return std::sqrt(pairwise_sum(t) * f.grid().cell_volume);
}

}  // namespace

StateLarge make_initial_large(const Field<double>& rho0, const Field<Vec3>& v0,
                              const Field<Tensor3>& F0, HCalibration calibration,
                              double alpha) {
  const Grid& g = rho0.grid();
  StateLarge s(g);
  s.calibration = calibration;
  s.has_H = calibration != HCalibration::None;
  for (long c = 0; c < g.ncells; ++c) {
    const double J0 = det(F0[c]);
    if (!(J0 > 0.0))
      throw DomainError("make_initial_large: det F0 must be > 0 everywhere");
    if (!(rho0[c] > 0.0))
      throw DomainError("make_initial_large: rho0 must be > 0 everywhere");
    s.rho[c] = rho0[c];
    s.p_mom[c] = rho0[c] * v0[c];
    s.F[c] = F0[c];
    s.J[c] = J0;
    switch (calibration) {
      case HCalibration::None:
        break;
      case HCalibration::CofF:
        s.H[c] = cof(F0[c]);
        break;
      case HCalibration::PowerJTimesF:
        s.H[c] = std::pow(J0, alpha) * F0[c];
        break;
      case HCalibration::MooneyRivlinCof:
        s.H[c] = std::pow(J0, -7.0 / 6.0) * cof(F0[c]);
        break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Quasi-static inelastic flow rule

namespace {

/// Forward-difference gradient stack of a DevTensor3 field at cell (i,j,k).
inline void grad_p_dev(const Field<DevTensor3>& f, int i, int j, int k, long idx,
                       DevTensor3* out) {
  const Grid& g = f.grid();
  for (int d = 0; d < g.dims; ++d)
    out[d] = (at_shift(f, i, j, k, d, +1) - f[idx]) * (1.0 / g.h[d]);
}

}  // namespace

Field<DevTensor3> solve_pi(const Field<Tensor3>& M, double nu, double q_exp,
                           double G_M, double tol, int max_iter) {
  const Grid& g = M.grid();
  if (!(G_M > 0.0)) throw DomainError("solve_pi: G_M must be > 0");
  if (nu < 0.0) throw DomainError("solve_pi: nu must be >= 0");
  if (nu > 0.0 && !(q_exp > 3.0))
    throw DomainError("solve_pi: nu > 0 requires exponent q > 3");

  Field<DevTensor3> Md(g);
  for (long c = 0; c < g.ncells; ++c) Md[c] = dev_part(M[c]);

  Field<DevTensor3> Pi(g);
  if (nu == 0.0) {
    // pointwise algebraic inversion; this exact expression is pinned by tests
    for (long c = 0; c < g.ncells; ++c) Pi[c] = Md[c] * (-1.0 / G_M);
    return Pi;
  }

  // minimize E(Pi) = sum G_M/2 |Pi|^2 + <Md,Pi> + nu/q |G+ Pi|^q (h^d weights
  // drop out of the optimality system)
  auto flux = [&](const Field<DevTensor3>& P, std::vector<std::array<DevTensor3, 3>>& sg) {
    sg.resize(g.ncells);
    g.for_each([&](long idx, int i, int j, int k) {
      DevTensor3 gp[3];
      grad_p_dev(P, i, j, k, idx, gp);
      double n2 = 0.0;
      for (int d = 0; d < g.dims; ++d) n2 += gp[d].norm2();
      const double w = nu * (n2 > 0.0 ? std::pow(n2, 0.5 * (q_exp - 2.0)) : 0.0);
      for (int d = 0; d < g.dims; ++d) sg[idx][d] = gp[d] * w;
      for (int d = g.dims; d < 3; ++d) sg[idx][d] = DevTensor3::zero();
    });
  };
  auto div_m_flux = [&](const std::vector<std::array<DevTensor3, 3>>& sg,
                        Field<DevTensor3>& out) {
    g.for_each([&](long idx, int i, int j, int k) {
      DevTensor3 acc;
      for (int d = 0; d < g.dims; ++d) {
        bool mir = false;
        const long im = g.neighbor(i, j, k, d, -1, mir);
        const DevTensor3 wm = mir ? DevTensor3::zero() : sg[im][d];
        acc += (sg[idx][d] - wm) * (1.0 / g.h[d]);
      }
      out[idx] = acc;
    });
  };
  auto gradient = [&](const Field<DevTensor3>& P, Field<DevTensor3>& out) {
    std::vector<std::array<DevTensor3, 3>> sg;
    flux(P, sg);
    div_m_flux(sg, out);
    for (long c = 0; c < g.ncells; ++c) out[c] = G_M * P[c] + Md[c] - out[c];
  };
  auto energy = [&](const Field<DevTensor3>& P) {
    std::vector<double> t(g.ncells);
    g.for_each([&](long idx, int i, int j, int k) {
      DevTensor3 gp[3];
      grad_p_dev(P, i, j, k, idx, gp);
      double n2 = 0.0;
      for (int d = 0; d < g.dims; ++d) n2 += gp[d].norm2();
      t[idx] = 0.5 * G_M * P[idx].norm2() + ddot(Md[idx], P[idx]) +
               (nu / q_exp) * std::pow(n2, 0.5 * q_exp);
    });
    return pairwise_sum(t);
  };

  double mscale = 0.0;
  for (long c = 0; c < g.ncells; ++c) mscale = std::max(mscale, Md[c].norm());
  const double gtol = tol * (mscale + G_M) * std::sqrt(double(g.ncells)) + 1e-300;

  Field<DevTensor3> grad(g), dir(g), hdir(g), trial(g), gtrial(g);
  gradient(Pi, grad);
  double eval = energy(Pi);

  for (int it = 0; it < max_iter; ++it) {
    double gn = field_l2(grad) / std::sqrt(g.cell_volume);
    if (gn <= gtol) return Pi;

    // Hessian-vector product of the convex functional at Pi
    std::vector<std::array<DevTensor3, 3>> base_g(g.ncells);
    g.for_each([&](long idx, int i, int j, int k) {
      DevTensor3 gp[3];
      grad_p_dev(Pi, i, j, k, idx, gp);
      for (int d = 0; d < 3; ++d)
        base_g[idx][d] = d < g.dims ? gp[d] : DevTensor3::zero();
    });
    auto hess_apply = [&](const Field<DevTensor3>& W, Field<DevTensor3>& out) {
      std::vector<std::array<DevTensor3, 3>> sg(g.ncells);
      g.for_each([&](long idx, int i, int j, int k) {
        DevTensor3 gw[3];
        grad_p_dev(W, i, j, k, idx, gw);
        double n2 = 0.0, gdotw = 0.0;
        for (int d = 0; d < g.dims; ++d) {
          n2 += base_g[idx][d].norm2();
          gdotw += ddot(base_g[idx][d], gw[d]);
        }
        const double s2 = n2;
        const double a = s2 > 0.0 ? nu * std::pow(s2, 0.5 * (q_exp - 2.0)) : 0.0;
        const double b =
            s2 > 0.0 ? nu * (q_exp - 2.0) * std::pow(s2, 0.5 * (q_exp - 4.0)) : 0.0;
        for (int d = 0; d < g.dims; ++d)
          sg[idx][d] = a * gw[d] + (b * gdotw) * base_g[idx][d];
        for (int d = g.dims; d < 3; ++d) sg[idx][d] = DevTensor3::zero();
      });
      div_m_flux(sg, out);
      for (long c = 0; c < g.ncells; ++c) out[c] = G_M * W[c] - out[c];
    };

    // CG on  H dir = -grad
    Field<DevTensor3> r(g), p(g), hp(g);
    dir.fill(DevTensor3::zero());
    for (long c = 0; c < g.ncells; ++c) r[c] = -1.0 * grad[c];
    p = r;
    double rr = 0.0;
    for (long c = 0; c < g.ncells; ++c) rr += ddot(r[c], r[c]);
    const double rr0 = rr;
    for (int cg = 0; cg < 200 && rr > 1e-24 * rr0; ++cg) {
      hess_apply(p, hp);
      double php = 0.0;
      for (long c = 0; c < g.ncells; ++c) php += ddot(p[c], hp[c]);
      if (!(php > 0.0)) break;
      const double alpha = rr / php;
      for (long c = 0; c < g.ncells; ++c) {
        dir[c] += alpha * p[c];
        r[c] -= alpha * hp[c];
      }
      double rr_new = 0.0;
      for (long c = 0; c < g.ncells; ++c) rr_new += ddot(r[c], r[c]);
      const double beta = rr_new / rr;
      rr = rr_new;
      if (rr <= 1e-6 * rr0) break;
      for (long c = 0; c < g.ncells; ++c) p[c] = r[c] + beta * p[c];
    }

    double gdotd = 0.0;
    for (long c = 0; c < g.ncells; ++c) gdotd += ddot(grad[c], dir[c]);
    double t = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (long c = 0; c < g.ncells; ++c) trial[c] = Pi[c] + t * dir[c];
      const double et = energy(trial);
      if (et <= eval + 1e-4 * t * gdotd) {
        Pi = trial;
        eval = et;
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) throw SolverError("solve_pi: line search failed");
    gradient(Pi, grad);
  }
  double gn = field_l2(grad) / std::sqrt(g.cell_volume);
  if (gn > 10.0 * gtol)
    throw SolverError("solve_pi: elliptic solver did not converge");
  return Pi;
}

// ---------------------------------------------------------------------------
// Kinematic residual helpers (0-D reductions of (c), (d) and the H-equation)

Tensor3 kinematic_residual_F(const Tensor3& Fk, const Tensor3& Fprev, double tau,
                             const Tensor3& grad_v, const DevTensor3& Pi) {
  return (Fk - Fprev) * (1.0 / tau) - grad_v * Fk + Fk * Pi.full();
}

double kinematic_residual_J(double Jk, double Jprev, double tau, double div_v) {
  return (Jk - Jprev) / tau - div_v * Jk;
}

Tensor3 kinematic_residual_H(const Tensor3& Hk, const Tensor3& Hprev, double tau,
                             const Tensor3& grad_v, const DevTensor3& Pi,
                             const Tensor3& Fk, double Jk,
                             HCalibration calibration, double alpha) {
  const double div_v = grad_v.trace();
  Tensor3 kin;
  switch (calibration) {
    case HCalibration::None:
      throw DomainError("kinematic_residual_H: state carries no H");
    case HCalibration::CofF:
      kin = cof_prime(Fk, grad_v * Fk - Fk * Pi.full());
      break;
    case HCalibration::PowerJTimesF:
      kin = alpha * div_v * Hk + grad_v * Hk - Hk * Pi.full();
      break;
    case HCalibration::MooneyRivlinCof:
      // chain-rule-consistent form for H = J^{-7/6} Cof F
      kin = std::pow(Jk, -7.0 / 6.0) * cof_prime(Fk, grad_v * Fk - Fk * Pi.full()) -
            (7.0 / 6.0) * div_v * Hk;
      break;
  }
  return (Hk - Hprev) * (1.0 / tau) - kin;
}

// ---------------------------------------------------------------------------
// Coupled residual

namespace {

constexpr int kMain = 14;  // rho(1) + p(3) + F(9) + J(1)

struct LargeWork {
  const StateLarge& old;
  const YosidaRegularizedEnergy& re;
  const SchemeParams& par;
  double tau;
  const Field<Vec3>& g_mid;
  double G_M = 0.0;  // 1/R when R > 0
  int nc = 10;       // transport components: 10 or 19
  int nd = 10;       // prox dof

  // per-cell prox warm starts, owned by the step attempt
  std::vector<double>* warm = nullptr;

  double s_rho = 1, s_p = 1, s_F = 1, s_J = 1, s_H = 1;
};

/// Evaluate everything the residual blocks need at a candidate state.
struct LargeEval {
  Field<Vec3> v;
  Field<Tensor3> grad_v;
  Field<double> diff_rho, div_mflux;
  Field<Vec3> conv, fcomp, hyp, div_flux;
  std::vector<double> trU;  // transport, nc per cell
  std::vector<EnergyDerivs> derivs;
  bool ok = false;
};

bool evaluate_common(const LargeWork& wk, const Field<double>& rho,
                     const Field<Vec3>& p, const Field<Tensor3>& F,
                     const Field<double>& J, const Field<Tensor3>& H,
                     LargeEval& ev) {
  const Grid& g = wk.old.grid();
  const long n = g.ncells;
  ev.v = Field<Vec3>(g);
  Field<Vec3> m(g);
  for (long c = 0; c < n; ++c) {
    if (!(rho[c] > 0.0) || !std::isfinite(rho[c])) return false;
    if (wk.re.mode() == RegularizationMode::Direct && !(J[c] > 0.0)) return false;
    ev.v[c] = p[c] * (1.0 / rho[c]);
    m[c] = cutoff_K(rho[c], wk.par.rho_max) * p[c];
  }
  ev.grad_v = grad_c(ev.v, kTv);
  const auto w = p_laplacian_flux(rho, wk.par.delta, wk.par.r_exp, kTs);
  ev.diff_rho = div_m(w, kTs);
  ev.div_mflux = div_c(m, kTv);
  ev.conv = convective_momentum(m, ev.v, kTv);
  ev.fcomp = compensating_force(w, ev.v, kTv);
  ev.hyp = hyperstress_apply(ev.v, wk.par.mu, wk.par.p_exp, kTv);

  // one regularized-energy evaluation per cell feeds the stress flux, the
  // transport weights and (later) the dissipation quadratures
  ev.derivs.resize(n);
  Field<Tensor3> flux(g);
  std::vector<double> U(n * wk.nc), phi(n), dphi(n * wk.nc);
  const bool hasH = wk.re.base().has_H();
  std::atomic<bool> fail{false};
  parallel_for(n, [&](long c) {
    if (fail.load(std::memory_order_relaxed)) return;
    double* warm = wk.warm ? wk.warm->data() + c * wk.nd : nullptr;
    EnergyDerivs d;
    try {
      d = wk.re.eval(F[c], H[c], J[c], warm);
    } catch (const SolverError&) {
      fail.store(true, std::memory_order_relaxed);
      return;
    }
    ev.derivs[c] = d;
    const StressPair sp = stress_from_derivs(wk.re.base().calibration(),
                                             wk.re.base().alpha(), d, F[c], H[c], J[c]);
    const SymTensor3 eps_v = sym(ev.grad_v[c]);
    flux[c] = sp.T + isotropic4_apply(eps_v, wk.par.K_V, wk.par.G_V).full();
    double* u = U.data() + c * wk.nc;
    double* dp = dphi.data() + c * wk.nc;
    for (int q = 0; q < 9; ++q) {
      u[q] = F[c].e[q];
      dp[q] = d.dF.e[q];
    }
    u[9] = J[c];
    dp[9] = d.dJ;
    if (hasH)
      for (int q = 0; q < 9; ++q) {
        u[10 + q] = H[c].e[q];
        dp[10 + q] = d.dH.e[q];
      }
    phi[c] = d.value;
  });
  if (fail.load()) return false;
  ev.div_flux = div_c(flux, kTv);
  energy_transport(g, ev.v, U, phi, dphi, wk.nc, ev.trU, kTs);
  ev.ok = true;
  return true;
}

/// Main-block residual (rho, p, F, J) with Pi and H frozen.
bool residual_main(const LargeWork& wk, const DVec& x, const Field<DevTensor3>& Pi,
                   const Field<Tensor3>& H, DVec& out) {
  const Grid& g = wk.old.grid();
  const long n = g.ncells;
  out.resize(n * kMain);

  Field<double> rho(g), J(g);
  Field<Vec3> p(g);
  Field<Tensor3> F(g);
  for (long c = 0; c < n; ++c) {
    const double* o = x.data() + c * kMain;
    rho[c] = o[0];
    FieldTraits<Vec3>::unpack(o + 1, p[c]);
    FieldTraits<Tensor3>::unpack(o + 4, F[c]);
    J[c] = o[13];
  }

  LargeEval ev;
  if (!evaluate_common(wk, rho, p, F, J, H, ev)) return false;

  const Field<Tensor3> lapF = laplacian_compact(F, kTs);
  const Field<double> lapJ = laplacian_compact(J, kTs);
  const double tau = wk.tau;
  const double pw = wk.par.p_exp;

  parallel_for(n, [&](long c) {
    double* o = out.data() + c * kMain;
    o[0] = ((rho[c] - wk.old.rho[c]) / tau - ev.diff_rho[c] + ev.div_mflux[c]) *
           (tau / wk.s_rho);

    const double vn2 = ev.v[c].norm2();
    const double epsv =
        wk.par.eps * (vn2 > 0.0 ? std::pow(vn2, 0.5 * (pw - 2.0)) : 0.0);
    const Vec3 rp = (p[c] - wk.old.p_mom[c]) * (1.0 / tau) - ev.div_flux[c] +
                    ev.hyp[c] + ev.conv[c] - rho[c] * wk.g_mid[c] +
                    epsv * ev.v[c] + ev.fcomp[c];
    o[1] = rp.x * (tau / wk.s_p);
    o[2] = rp.y * (tau / wk.s_p);
    o[3] = rp.z * (tau / wk.s_p);

    Tensor3 trF;
    for (int q = 0; q < 9; ++q) trF.e[q] = ev.trU[c * wk.nc + q];
    const Tensor3 rF = kinematic_residual_F(F[c], wk.old.F[c], tau, ev.grad_v[c],
                                            Pi[c]) +
                       trF - wk.par.delta * lapF[c];
    for (int q = 0; q < 9; ++q) o[4 + q] = rF.e[q] * (tau / wk.s_F);

    const double rJ = kinematic_residual_J(J[c], wk.old.J[c], tau,
                                           ev.grad_v[c].trace()) +
                      ev.trU[c * wk.nc + 9] - wk.par.delta * lapJ[c];
    o[13] = rJ * (tau / wk.s_J);
  });
  return true;
}

/// H-block residual with everything else frozen.
bool residual_Hblock(const LargeWork& wk, const DVec& xh, const Field<double>& rho,
                     const Field<Vec3>& p, const Field<Tensor3>& F,
                     const Field<double>& J, const Field<DevTensor3>& Pi,
                     DVec& out) {
  const Grid& g = wk.old.grid();
  const long n = g.ncells;
  out.resize(n * 9);
  Field<Tensor3> H(g);
  for (long c = 0; c < n; ++c) FieldTraits<Tensor3>::unpack(xh.data() + c * 9, H[c]);

  LargeEval ev;
  if (!evaluate_common(wk, rho, p, F, J, H, ev)) return false;
  const Field<Tensor3> lapH = laplacian_compact(H, kTs);

  parallel_for(n, [&](long c) {
    Tensor3 trH;
    for (int q = 0; q < 9; ++q) trH.e[q] = ev.trU[c * wk.nc + 10 + q];
    const Tensor3 rH =
        kinematic_residual_H(H[c], wk.old.H[c], wk.tau, ev.grad_v[c], Pi[c], F[c],
                             J[c], wk.old.calibration, wk.re.base().alpha()) +
        trH - wk.par.delta * lapH[c];
    for (int q = 0; q < 9; ++q) out[c * 9 + q] = rH.e[q] * (wk.tau / wk.s_H);
  });
  return true;
}

/// Pi-equation residual field (Frobenius strong form), zero in KV mode.
void residual_pi(const LargeWork& wk, const Field<DevTensor3>& Pi,
                 const Field<Tensor3>& M, Field<DevTensor3>& out) {
  const Grid& g = wk.old.grid();
  // gradient of the convex Pi functional = G_M Pi - div(nu|grad Pi|^{q-2} grad Pi) + dev M
  std::vector<std::array<DevTensor3, 3>> sg(g.ncells);
  g.for_each([&](long idx, int i, int j, int k) {
    DevTensor3 gp[3];
    grad_p_dev(Pi, i, j, k, idx, gp);
    double n2 = 0.0;
    for (int d = 0; d < g.dims; ++d) n2 += gp[d].norm2();
    const double w =
        wk.par.nu * (n2 > 0.0 ? std::pow(n2, 0.5 * (wk.par.q_exp - 2.0)) : 0.0);
    for (int d = 0; d < 3; ++d)
      sg[idx][d] = d < g.dims ? gp[d] * w : DevTensor3::zero();
  });
  g.for_each([&](long idx, int i, int j, int k) {
    DevTensor3 acc;
    for (int d = 0; d < g.dims; ++d) {
      bool mir = false;
      const long im = g.neighbor(i, j, k, d, -1, mir);
      const DevTensor3 wm = mir ? DevTensor3::zero() : sg[im][d];
      acc += (sg[idx][d] - wm) * (1.0 / g.h[d]);
    }
    out[idx] = wk.G_M * Pi[idx] + dev_part(M[idx]) - acc;
  });
}

struct FullResidualNorms {
  double main = 0.0, h = 0.0, pi = 0.0;
  double total() const { return std::sqrt(main * main + h * h + pi * pi); }
};

}  // namespace

namespace {

StateLarge attempt_step_large(const StateLarge& old,
                              const YosidaRegularizedEnergy& re,
                              const SchemeParams& par, const GravityFn& gravity,
                              double tau, int depth,
                              std::vector<LargeStepRecord>* records) {
  const Grid& g = old.grid();
  const long n = g.ncells;
  const Field<Vec3> g_mid = gravity_field(g, gravity, old.time + 0.5 * tau);
  const bool jeffreys = par.R > 0.0;
  const bool hasH = old.has_H;

  LargeWork wk{old, re, par, tau, g_mid};
  wk.G_M = jeffreys ? 1.0 / par.R : 0.0;
  wk.nc = re.base().has_H() ? 19 : 10;
  wk.nd = re.base().ndof();
  wk.s_rho = std::max(max_abs(old.rho), 1e-8);
  wk.s_p = std::max(max_norm(old.p_mom), wk.s_rho);
  wk.s_F = std::max(max_norm(old.F), 1.0);
  wk.s_J = std::max(max_abs(old.J), 1.0);
  wk.s_H = hasH ? std::max(max_norm(old.H), 1.0) : 1.0;

  if (re.mode() == RegularizationMode::SimpleCap) {
    double jmin = HUGE_VAL;
    for (long c = 0; c < n; ++c) jmin = std::min(jmin, old.J[c]);
    re.set_j_floor(0.5 * jmin);
    re.reset_cap_flag();
  }

  // prox warm starts
  std::vector<double> warm(n * wk.nd);
  for (long c = 0; c < n; ++c)
    re.base().pack(old.F[c], old.H[c], old.J[c], warm.data() + c * wk.nd);
  wk.warm = &warm;

  Field<DevTensor3> Pi = old.Pi;
  if (!jeffreys) Pi.fill(DevTensor3::zero());
  Field<Tensor3> H = old.H;

  DVec xmain(n * kMain);
  for (long c = 0; c < n; ++c) {
    double* o = xmain.data() + c * kMain;
    o[0] = old.rho[c];
    FieldTraits<Vec3>::pack(old.p_mom[c], o + 1);
    FieldTraits<Tensor3>::pack(old.F[c], o + 4);
    o[13] = old.J[c];
  }

  auto unpack_main = [&](const DVec& x, Field<double>& rho, Field<Vec3>& p,
                         Field<Tensor3>& F, Field<double>& J) {
    for (long c = 0; c < n; ++c) {
      const double* o = x.data() + c * kMain;
      rho[c] = o[0];
      FieldTraits<Vec3>::unpack(o + 1, p[c]);
      FieldTraits<Tensor3>::unpack(o + 4, F[c]);
      J[c] = o[13];
    }
  };

  auto mandel_field = [&](const Field<double>& rho, const Field<Vec3>& p,
                          const Field<Tensor3>& F, const Field<double>& J,
                          Field<Tensor3>& M) {
    (void)rho;
    (void)p;
    parallel_for(n, [&](long c) {
      double* wc = warm.data() + c * wk.nd;
      const EnergyDerivs d = re.eval(F[c], H[c], J[c], wc);
      M[c] = stress_from_derivs(re.base().calibration(), re.base().alpha(), d, F[c],
                                H[c], J[c])
                 .M;
    });
  };

  auto full_norms = [&](const DVec& x) {
    Field<double> rho(g), J(g);
    Field<Vec3> p(g);
    Field<Tensor3> F(g);
    unpack_main(x, rho, p, F, J);
    FullResidualNorms fr;
    DVec rm;
    if (!residual_main(wk, x, Pi, H, rm)) {
      fr.main = HUGE_VAL;
      return fr;
    }
    double s = 0.0;
    for (double v : rm) s += v * v;
    fr.main = std::sqrt(s);
    if (hasH) {
      DVec xh(n * 9), rh;
      for (long c = 0; c < n; ++c)
        FieldTraits<Tensor3>::pack(H[c], xh.data() + c * 9);
      residual_Hblock(wk, xh, rho, p, F, J, Pi, rh);
      s = 0.0;
      for (double v : rh) s += v * v;
      fr.h = std::sqrt(s);
    }
    if (jeffreys) {
      Field<Tensor3> M(g);
      mandel_field(rho, p, F, J, M);
      Field<DevTensor3> rp(g);
      residual_pi(wk, Pi, M, rp);
      // scale like the other blocks: tau / (G_M * Pi-scale + M-scale)
      double msc = 1e-8;
      for (long c = 0; c < n; ++c) msc = std::max(msc, M[c].norm());
      s = 0.0;
      for (long c = 0; c < n; ++c) s += rp[c].norm2();
      fr.pi = std::sqrt(s) / msc;
    }
    return fr;
  };

  NewtonOptions opt;
  opt.tol_rel = par.newton_tol_rel;
  opt.tol_abs = par.newton_tol_abs;
  opt.scale_hint = std::sqrt(double(n * kMain));
  opt.max_iter = par.newton_max_iter;
  opt.gmres_restart = par.gmres_restart;
  opt.gmres_max_iter = par.gmres_max_iter;
  opt.forcing = par.gmres_tol;
  opt.feasible = [n](const DVec& y) {
    for (long c = 0; c < n; ++c)
      if (!(y[c * kMain] > 0.0) || !(y[c * kMain + 13] > 0.0)) return false;
    return true;
  };

  SolveStats agg;
  int sweeps = 0;
  const double tol_full =
      par.newton_tol_abs * std::sqrt(double(n * (kMain + 9 + 5))) +
      par.newton_tol_rel * std::max(1.0, full_norms(xmain).total());
  bool converged = false;

  try {
    for (sweeps = 1; sweeps <= 12; ++sweeps) {
      Field<double> rho(g), J(g);
      Field<Vec3> p(g);
      Field<Tensor3> F(g);
      unpack_main(xmain, rho, p, F, J);

      if (jeffreys) {
        Field<Tensor3> M(g);
        mandel_field(rho, p, F, J, M);
        Pi = solve_pi(M, par.nu, par.q_exp, wk.G_M, par.pi_solve_tol,
                      par.pi_solve_max_iter);
      }
      if (hasH) {
        DVec xh(n * 9);
        for (long c = 0; c < n; ++c)
          FieldTraits<Tensor3>::pack(H[c], xh.data() + c * 9);
        NewtonOptions opth = opt;
        opth.scale_hint = std::sqrt(double(n * 9));
        opth.max_iter = 10;
        opth.feasible = nullptr;
        auto fnh = [&](const DVec& y, DVec& r) {
          return residual_Hblock(wk, y, rho, p, F, J, Pi, r);
        };
        const SolveStats sh = newton_krylov(fnh, xh, opth);
        agg.newton_iters += sh.newton_iters;
        agg.krylov_iters += sh.krylov_iters;
        for (long c = 0; c < n; ++c)
          FieldTraits<Tensor3>::unpack(xh.data() + c * 9, H[c]);
      }

      auto fnm = [&](const DVec& y, DVec& r) {
        return residual_main(wk, y, Pi, H, r);
      };
      const SolveStats sm = newton_krylov(fnm, xmain, opt);
      agg.newton_iters += sm.newton_iters;
      agg.krylov_iters += sm.krylov_iters;
      agg.damping_events += sm.damping_events;
      agg.residual0 = sweeps == 1 ? sm.residual0 : agg.residual0;

      const FullResidualNorms fr = full_norms(xmain);
      agg.residual = fr.total();
      if (fr.total() <= tol_full || ((!jeffreys && !hasH) && sm.converged)) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw SolverError("step_large: outer Gauss-Seidel loop did not converge");
  } catch (const SolverError& e) {
    if (depth >= par.max_tau_halvings) {
      double jmin = HUGE_VAL, rmin = HUGE_VAL;
      for (long c = 0; c < n; ++c) {
        jmin = std::min(jmin, xmain[c * kMain + 13]);
        rmin = std::min(rmin, xmain[c * kMain]);
      }
      throw StepFailure("step_large: solver failed at minimum tau",
                        std::string(e.what()) + " (tau=" + std::to_string(tau) +
                            ", min rho=" + std::to_string(rmin) +
                            ", min J=" + std::to_string(jmin) + ")");
    }
    StateLarge mid =
        attempt_step_large(old, re, par, gravity, 0.5 * tau, depth + 1, records);
    return attempt_step_large(mid, re, par, gravity, 0.5 * tau, depth + 1, records);
  }
  agg.converged = true;
  agg.tol_used = tol_full;
  agg.tau_halvings = depth;

  StateLarge next(g);
  next.has_H = hasH;
  next.calibration = old.calibration;
  next.time = old.time + tau;
  unpack_main(xmain, next.rho, next.p_mom, next.F, next.J);
  next.Pi = Pi;
  next.H = H;

  // post-hoc assertions
  double rmin = HUGE_VAL, rmax = -HUGE_VAL, jmin = HUGE_VAL;
  for (long c = 0; c < n; ++c) {
    rmin = std::min(rmin, next.rho[c]);
    rmax = std::max(rmax, next.rho[c]);
    jmin = std::min(jmin, next.J[c]);
  }
  if (!(rmin > 0.0))
    throw StepFailure("step_large: density positivity violated",
                      "min rho = " + std::to_string(rmin));
  if (rmax > par.rho_max + 1.0 + 1e-12 * par.rho_max)
    throw StepFailure("step_large: density exceeded rho_max + 1",
                      "max rho = " + std::to_string(rmax));
  if (!(jmin > 0.0))
    throw StepFailure("step_large: Jacobian positivity violated",
                      "min J = " + std::to_string(jmin));

  if (records) {
    LargeStepRecord rec;
    rec.tau = tau;
    rec.outer_sweeps = sweeps;
    rec.cap_active = re.cap_active();
    rec.report = energy_report_large(old, next, re, par, tau, g_mid);

    // solver-residual pairing bound for the inequality slack
    LargeWork wphys = wk;
    wphys.s_rho = wphys.s_p = wphys.s_F = wphys.s_J = wphys.s_H = tau;
    DVec rphys;
    residual_main(wphys, xmain, Pi, H, rphys);
    Field<double> r_rho(g), half_v2(g), r_J(g), gJ(g);
    Field<Vec3> r_p(g), v(g);
    Field<Tensor3> r_F(g), gF(g), gH(g), r_H(g);
    for (long c = 0; c < n; ++c) {
      const double* o = rphys.data() + c * kMain;
      r_rho[c] = o[0];
      FieldTraits<Vec3>::unpack(o + 1, r_p[c]);
      FieldTraits<Tensor3>::unpack(o + 4, r_F[c]);
      r_J[c] = o[13];
      v[c] = next.p_mom[c] * (1.0 / next.rho[c]);
      half_v2[c] = 0.5 * v[c].norm2();
      const EnergyDerivs d =
          re.eval(next.F[c], next.H[c], next.J[c], warm.data() + c * wk.nd);
      gF[c] = d.dF;
      gJ[c] = d.dJ;
      gH[c] = d.dH;
    }
    double pairing = field_l2(r_rho) * field_l2(half_v2) +
                     field_l2(r_p) * field_l2(v) + field_l2(r_F) * field_l2(gF) +
                     field_l2(r_J) * field_l2(gJ);
    if (hasH) {
      DVec xh(n * 9), rh;
      for (long c = 0; c < n; ++c)
        FieldTraits<Tensor3>::pack(H[c], xh.data() + c * 9);
      LargeWork wh = wphys;
      residual_Hblock(wh, xh, next.rho, next.p_mom, next.F, next.J, Pi, rh);
      for (long c = 0; c < n; ++c)
        FieldTraits<Tensor3>::unpack(rh.data() + c * 9, r_H[c]);
      pairing += field_l2(r_H) * field_l2(gH);
    }
    if (jeffreys) {
      Field<Tensor3> M(g);
      mandel_field(next.rho, next.p_mom, next.F, next.J, M);
      Field<DevTensor3> rp(g);
      residual_pi(wk, Pi, M, rp);
      pairing += field_l2(rp) * field_l2(Pi);
    }
    const EnergyReport& er = rec.report;
    const double floor =
        1e-12 * (std::abs(er.kinetic) + std::abs(er.stored) +
                 tau * (er.total_dissipation() + std::abs(er.gravity_power)) + 1e-300);
    rec.report.slack_budget = 10.0 * (tau * pairing + floor);
    agg.energy_slack_budget = rec.report.slack_budget;
    rec.stats = agg;
    records->push_back(std::move(rec));
  }
  return next;
}

}  // namespace

StateLarge step_large(const StateLarge& old, const YosidaRegularizedEnergy& mat,
                      const SchemeParams& par, const GravityFn& gravity,
                      std::vector<LargeStepRecord>* records) {
  par.require_valid(true);
  if (old.has_H != mat.base().has_H())
    throw DomainError("step_large: state H-calibration does not match the material");
  SchemeParams p = par;
  if (!(p.rho_max > 0.0)) {
    double m = 0.0;
    for (long c = 0; c < old.rho.size(); ++c) m = std::max(m, old.rho[c]);
    p.rho_max = 4.0 * m;
  }
  return attempt_step_large(old, mat, p, gravity, p.tau, 0, records);
}

}  // namespace eulervisc
