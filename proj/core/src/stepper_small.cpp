// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/stepper_small.hpp"

#include <cmath>

#include "eulervisc/audit.hpp"
#include "eulervisc/util.hpp"

namespace eulervisc {

namespace {

constexpr int kComp = 10;  // rho(1) + p(3) + E(6)

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
double max_norm(const Field<SymTensor3>& f) {
  double m = 0.0;
  for (long i = 0; i < f.size(); ++i) m = std::max(m, f[i].norm());
  return m;
}

double field_l2(const Field<double>& f) {
  std::vector<double> t(f.size());
  for (long i = 0; i < f.size(); ++i) t[i] = f[i] * f[i];
  return std::sqrt(pairwise_sum(t) * f.grid().cell_volume);
}
double field_l2(const Field<Vec3>& f) {
  std::vector<double> t(f.size());
  for (long i = 0; i < f.size(); ++i) t[i] = f[i].norm2();
  return std::sqrt(pairwise_sum(t) * f.grid().cell_volume);
}
double field_l2(const Field<SymTensor3>& f) {
  std::vector<double> t(f.size());
  for (long i = 0; i < f.size(); ++i) t[i] = f[i].norm2();
  return std::sqrt(pairwise_sum(t) * f.grid().cell_volume);
}

}  // namespace

Field<Vec3> gravity_field(const Grid& g, const GravityFn& fn, double t) {
  Field<Vec3> out(g);
  if (!fn) return out;
  g.for_each([&](long idx, int i, int j, int k) {
    const Vec3 x{g.coord(0, i), g.coord(1, j), g.coord(2, k)};
    out[idx] = fn(t, x);
  });
  return out;
}

void pack_state_small(const StateSmall& s, DVec& x) {
  const long n = s.rho.size();
  x.resize(n * kComp);
  for (long c = 0; c < n; ++c) {
    double* o = x.data() + c * kComp;
    o[0] = s.rho[c];
    FieldTraits<Vec3>::pack(s.p_mom[c], o + 1);
    FieldTraits<SymTensor3>::pack(s.E[c], o + 4);
  }
}

void unpack_state_small(const DVec& x, StateSmall& s) {
  const long n = s.rho.size();
  for (long c = 0; c < n; ++c) {
    const double* o = x.data() + c * kComp;
    s.rho[c] = o[0];
    FieldTraits<Vec3>::unpack(o + 1, s.p_mom[c]);
    FieldTraits<SymTensor3>::unpack(o + 4, s.E[c]);
  }
}

bool residual_small(const DVec& x, const StateSmall& old,
                    const IsotropicQuadraticEnergy& mat, const SchemeParams& par,
                    double tau, const Field<Vec3>& g_mid, const double* scales,
                    DVec& out) {
  const Grid& g = old.grid();
  const long n = g.ncells;
  out.resize(n * kComp);

  const BCTag tv = BCTag::Impermeable;
  const BCTag ts = BCTag::Neumann;

  Field<double> rho(g);
  Field<Vec3> p(g), v(g), m(g);
  Field<SymTensor3> E(g);
  for (long c = 0; c < n; ++c) {
    const double* o = x.data() + c * kComp;
    rho[c] = o[0];
    if (!(rho[c] > 0.0) || !std::isfinite(rho[c])) return false;
    FieldTraits<Vec3>::unpack(o + 1, p[c]);
    FieldTraits<SymTensor3>::unpack(o + 4, E[c]);
    v[c] = p[c] * (1.0 / rho[c]);
    m[c] = cutoff_K(rho[c], par.rho_max) * p[c];
  }

  const Field<Tensor3> grad_v = grad_c(v, tv);
  const auto w = p_laplacian_flux(rho, par.delta, par.r_exp, ts);
  const Field<double> diff_rho = div_m(w, ts);
  const Field<double> div_mflux = div_c(m, tv);
  const Field<Vec3> conv = convective_momentum(m, v, tv);
  const Field<Vec3> fcomp = compensating_force(w, v, tv);
  const Field<Vec3> hyp = hyperstress_apply(v, par.mu, par.p_exp, tv);
  const Field<SymTensor3> lapE = laplacian_compact(E, ts);

  // stress flux T + D_visc and the packed energy data for the transport
  Field<Tensor3> flux(g);
  std::vector<double> U(n * 6), phi(n), dphi(n * 6);
  Field<SymTensor3> devT(g);
  for (long c = 0; c < n; ++c) {
    const SymTensor3 eps_v = sym(grad_v[c]);
    const SymTensor3 dphi_c = dphi_small(E[c], mat);
    const double phi_c = phi_small(E[c], mat);
    SymTensor3 T = dphi_c;
    T.e[SymTensor3::XX] += phi_c;
    T.e[SymTensor3::YY] += phi_c;
    T.e[SymTensor3::ZZ] += phi_c;
    flux[c] = (T + isotropic4_apply(eps_v, par.K_V, par.G_V)).full();
    devT[c] = dev_sym(dphi_c);
    FieldTraits<SymTensor3>::pack(E[c], U.data() + c * 6);
    phi[c] = phi_c;
    // dual packing: off-diagonal slots doubled so the packed dot product is
    // the Frobenius pairing
    double* d = dphi.data() + c * 6;
    FieldTraits<SymTensor3>::pack(dphi_c, d);
    d[3] *= 2.0;
    d[4] *= 2.0;
    d[5] *= 2.0;
  }
  const Field<Vec3> div_flux = div_c(flux, tv);

  std::vector<double> trE;
  energy_transport(g, v, U, phi, dphi, 6, trE, ts);

  const double sr = tau / scales[0];
  const double sp = tau / scales[1];
  const double sE = tau / scales[2];
  const double pw = par.p_exp;

  parallel_for(n, [&](long c) {
    double* o = out.data() + c * kComp;
    o[0] = ((rho[c] - old.rho[c]) / tau - diff_rho[c] + div_mflux[c]) * sr;

    const double vn2 = v[c].norm2();
    const double epsv = par.eps * (vn2 > 0.0 ? std::pow(vn2, 0.5 * (pw - 2.0)) : 0.0);
    const Vec3 rp = (p[c] - old.p_mom[c]) * (1.0 / tau) - div_flux[c] + hyp[c] +
                    conv[c] - rho[c] * g_mid[c] + epsv * v[c] + fcomp[c];
    o[1] = rp.x * sp;
    o[2] = rp.y * sp;
    o[3] = rp.z * sp;

    SymTensor3 tE;
    FieldTraits<SymTensor3>::unpack(trE.data() + c * 6, tE);
    const SymTensor3 bzj = b_zj(grad_v[c], tE, E[c]);
    const SymTensor3 rE = (E[c] - old.E[c]) * (1.0 / tau) - sym(grad_v[c]) +
                          par.R * devT[c] + bzj - par.delta * lapE[c];
    for (int q = 0; q < 6; ++q) o[4 + q] = rE.e[q] * sE;
  });
  return true;
}

namespace {

StateSmall attempt_step(const StateSmall& old, const IsotropicQuadraticEnergy& mat,
                        const SchemeParams& par, const GravityFn& gravity,
                        double tau, int depth,
                        std::vector<SmallStepRecord>* records) {
  const Grid& g = old.grid();
  const Field<Vec3> g_mid = gravity_field(g, gravity, old.time + 0.5 * tau);

  double scales[3];
  scales[0] = std::max(max_abs(old.rho), 1e-8);
  scales[1] = std::max(max_norm(old.p_mom), scales[0]);
  scales[2] = std::max(max_norm(old.E), 1e-2);

  DVec x;
  pack_state_small(old, x);
  const long n = g.ncells;

  NewtonOptions opt;
  opt.tol_rel = par.newton_tol_rel;
  opt.tol_abs = par.newton_tol_abs;
  opt.scale_hint = std::sqrt(double(n * kComp));
  opt.max_iter = par.newton_max_iter;
  opt.gmres_restart = par.gmres_restart;
  opt.gmres_max_iter = par.gmres_max_iter;
  opt.forcing = par.gmres_tol;
  opt.feasible = [n](const DVec& y) {
    for (long c = 0; c < n; ++c)
      if (!(y[c * kComp] > 0.0)) return false;
    return true;
  };

  auto fn = [&](const DVec& y, DVec& r) {
    return residual_small(y, old, mat, par, tau, g_mid, scales, r);
  };

  SolveStats stats;
  try {
    stats = newton_krylov(fn, x, opt);
  } catch (const SolverError& e) {
    if (depth >= par.max_tau_halvings)
      throw StepFailure("step_small: solver failed at minimum tau",
                        std::string(e.what()) + " (tau=" + std::to_string(tau) + ")");
    StateSmall mid =
        attempt_step(old, mat, par, gravity, 0.5 * tau, depth + 1, records);
    return attempt_step(mid, mat, par, gravity, 0.5 * tau, depth + 1, records);
  }
  stats.tau_halvings = depth;

  StateSmall next(g);
  unpack_state_small(x, next);
  next.time = old.time + tau;

  // maximum-principle assertions (post-hoc; paper proves them for the
  // continuous-space scheme)
  double rmin = HUGE_VAL, rmax = -HUGE_VAL;
  for (long c = 0; c < n; ++c) {
    rmin = std::min(rmin, next.rho[c]);
    rmax = std::max(rmax, next.rho[c]);
  }
  if (!(rmin > 0.0))
    throw StepFailure("step_small: density positivity violated",
                      "min rho = " + std::to_string(rmin));
  if (rmax > par.rho_max + 1.0 + 1e-12 * par.rho_max)
    throw StepFailure("step_small: density exceeded rho_max + 1",
                      "max rho = " + std::to_string(rmax) +
                          ", rho_max = " + std::to_string(par.rho_max));

  if (records) {
    SmallStepRecord rec;
    rec.tau = tau;
    rec.report = energy_report_small(old, next, mat, par, tau, g_mid);

    // Solver-residual pairing bound for the inequality slack: the physical
    // residual (scales = tau makes the row scaling cancel) paired with the
    // test functions of the energy identity, plus a round-off floor.
    DVec rphys;
    double sphys[3] = {tau, tau, tau};
    residual_small(x, old, mat, par, tau, g_mid, sphys, rphys);
    Field<double> r_rho(g), half_v2(g);
    Field<Vec3> r_p(g), v(g);
    Field<SymTensor3> r_E(g), dphi(g);
    for (long c = 0; c < n; ++c) {
      const double* o = rphys.data() + c * kComp;
      r_rho[c] = o[0];
      FieldTraits<Vec3>::unpack(o + 1, r_p[c]);
      FieldTraits<SymTensor3>::unpack(o + 4, r_E[c]);
      v[c] = next.p_mom[c] * (1.0 / next.rho[c]);
      half_v2[c] = 0.5 * v[c].norm2();
      dphi[c] = dphi_small(next.E[c], mat);
    }
    const double pairing = field_l2(r_rho) * field_l2(half_v2) +
                           field_l2(r_p) * field_l2(v) +
                           field_l2(r_E) * field_l2(dphi);
    const EnergyReport& er = rec.report;
    const double floor =
        1e-12 * (std::abs(er.kinetic) + std::abs(er.stored) +
                 tau * (er.total_dissipation() + std::abs(er.gravity_power)) + 1e-300);
    rec.report.slack_budget = 10.0 * (tau * pairing + floor);
    stats.energy_slack_budget = rec.report.slack_budget;
    stats.dissipation[0] = er.diss_stokes;
    stats.dissipation[1] = er.diss_hyper;
    stats.dissipation[2] = er.diss_maxwell;
    stats.dissipation[3] = er.diss_eps0;
    stats.dissipation[4] = er.diss_delta_grad;
    rec.stats = stats;
    records->push_back(std::move(rec));
  }
  return next;
}

}  // namespace

StateSmall step_small(const StateSmall& old, const IsotropicQuadraticEnergy& mat,
                      const SchemeParams& par, const GravityFn& gravity,
                      std::vector<SmallStepRecord>* records) {
  par.require_valid(false);
  SchemeParams p = par;
  if (!(p.rho_max > 0.0)) {
    double m = 0.0;
    for (long c = 0; c < old.rho.size(); ++c) m = std::max(m, old.rho[c]);
    p.rho_max = 4.0 * m;
  }
  return attempt_step(old, mat, p, gravity, p.tau, 0, records);
}

}  // namespace eulervisc
