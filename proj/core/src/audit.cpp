// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/audit.hpp"

#include <cmath>
#include <sstream>

#include "eulervisc/util.hpp"

namespace eulervisc {

namespace {

constexpr BCTag kTv = BCTag::Impermeable;
constexpr BCTag kTs = BCTag::Neumann;

double kinetic_energy(const Field<double>& rho, const Field<Vec3>& p) {
  std::vector<double> t(rho.size());
  for (long c = 0; c < rho.size(); ++c) t[c] = 0.5 * p[c].norm2() / rho[c];
  return pairwise_sum(t) * rho.grid().cell_volume;
}

Field<Vec3> velocity(const Field<double>& rho, const Field<Vec3>& p) {
  Field<Vec3> v(rho.grid());
  for (long c = 0; c < rho.size(); ++c) v[c] = p[c] * (1.0 / rho[c]);
  return v;
}

double stokes_dissipation(const Field<Tensor3>& grad_v, double K_V, double G_V) {
  std::vector<double> t(grad_v.size());
  for (long c = 0; c < grad_v.size(); ++c) {
    const SymTensor3 e = sym(grad_v[c]);
    t[c] = 3.0 * K_V * sph(e).norm2() + 2.0 * G_V * dev_sym(e).norm2();
  }
  return pairwise_sum(t) * grad_v.grid().cell_volume;
}

double eps0_dissipation(const Field<Vec3>& v, double eps, double p_exp) {
  if (eps == 0.0) return 0.0;
  std::vector<double> t(v.size());
  for (long c = 0; c < v.size(); ++c)
    t[c] = eps * std::pow(v[c].norm2(), 0.5 * p_exp);
  return pairwise_sum(t) * v.grid().cell_volume;
}

double gravity_power(const Field<double>& rho, const Field<Vec3>& v,
                     const Field<Vec3>& g_mid) {
  std::vector<double> t(rho.size());
  for (long c = 0; c < rho.size(); ++c) t[c] = rho[c] * dot(g_mid[c], v[c]);
  return pairwise_sum(t) * rho.grid().cell_volume;
}

}  // namespace

double mass(const StateSmall& s) { return integrate(s.rho); }
double mass(const StateLarge& s) { return integrate(s.rho); }

DensityBounds density_bounds(const StateSmall& s) {
  DensityBounds b{HUGE_VAL, -HUGE_VAL};
  for (long c = 0; c < s.rho.size(); ++c) {
    b.min_rho = std::min(b.min_rho, s.rho[c]);
    b.max_rho = std::max(b.max_rho, s.rho[c]);
  }
  return b;
}
DensityBounds density_bounds(const StateLarge& s) {
  DensityBounds b{HUGE_VAL, -HUGE_VAL};
  for (long c = 0; c < s.rho.size(); ++c) {
    b.min_rho = std::min(b.min_rho, s.rho[c]);
    b.max_rho = std::max(b.max_rho, s.rho[c]);
  }
  return b;
}

double jacobian_drift(const StateLarge& s) {
  double d = 0.0;
  for (long c = 0; c < s.J.size(); ++c)
    d = std::max(d, std::abs(s.J[c] - det(s.F[c])));
  return d;
}

double min_jacobian(const StateLarge& s) {
  double m = HUGE_VAL;
  for (long c = 0; c < s.J.size(); ++c) m = std::min(m, s.J[c]);
  return m;
}

EnergyReport energy_report_small(const StateSmall& oldst, const StateSmall& newst,
                                 const IsotropicQuadraticEnergy& mat,
                                 const SchemeParams& par, double tau,
                                 const Field<Vec3>& g_mid) {
  const Grid& g = newst.grid();
  EnergyReport r;
  r.time = newst.time;
  r.tau = tau;

  const Field<Vec3> v = velocity(newst.rho, newst.p_mom);
  const Field<Tensor3> grad_v = grad_c(v, kTv);

  r.kinetic = kinetic_energy(newst.rho, newst.p_mom);
  const double ke_old = kinetic_energy(oldst.rho, oldst.p_mom);

  std::vector<double> t(g.ncells);
  for (long c = 0; c < g.ncells; ++c) t[c] = phi_small(newst.E[c], mat);
  r.stored = pairwise_sum(t) * g.cell_volume;
  for (long c = 0; c < g.ncells; ++c) t[c] = phi_small(oldst.E[c], mat);
  const double se_old = pairwise_sum(t) * g.cell_volume;

  r.diss_stokes = stokes_dissipation(grad_v, par.K_V, par.G_V);
  r.diss_hyper = hyperstress_dissipation(v, par.mu, par.p_exp, kTv);
  for (long c = 0; c < g.ncells; ++c)
    t[c] = par.R * dev_sym(dphi_small(newst.E[c], mat)).norm2();
  r.diss_maxwell = pairwise_sum(t) * g.cell_volume;
  r.diss_eps0 = eps0_dissipation(v, par.eps, par.p_exp);

  // monotone pairing of delta * Laplacian(E) with phi'(E): for quadratic phi
  // this is exactly the A-weighted forward-difference gradient quadrature
  if (par.delta > 0.0) {
    std::vector<double> face(g.ncells, 0.0);
    g.for_each([&](long idx, int i, int j, int k) {
      double acc = 0.0;
      for (int d = 0; d < g.dims; ++d) {
        const SymTensor3 dE =
            (at_shift(newst.E, i, j, k, d, +1) - newst.E[idx]) * (1.0 / g.h[d]);
        acc += 3.0 * mat.K_E * sph(dE).norm2() + 2.0 * mat.G_E * dev_sym(dE).norm2();
      }
      face[idx] = acc;
    });
    r.diss_delta_grad = par.delta * pairwise_sum(face) * g.cell_volume;
  }

  r.gravity_power = gravity_power(newst.rho, v, g_mid);
  r.mass = mass(newst);
  const DensityBounds b = density_bounds(newst);
  r.min_rho = b.min_rho;
  r.max_rho = b.max_rho;

  r.inequality_slack = (r.kinetic + r.stored) - (ke_old + se_old) +
                       tau * r.total_dissipation() - tau * r.gravity_power;
  return r;
}

EnergyReport energy_report_large(const StateLarge& oldst, const StateLarge& newst,
                                 const YosidaRegularizedEnergy& mat,
                                 const SchemeParams& par, double tau,
                                 const Field<Vec3>& g_mid) {
  const Grid& g = newst.grid();
  const long n = g.ncells;
  EnergyReport r;
  r.time = newst.time;
  r.tau = tau;

  const Field<Vec3> v = velocity(newst.rho, newst.p_mom);
  const Field<Tensor3> grad_v = grad_c(v, kTv);

  r.kinetic = kinetic_energy(newst.rho, newst.p_mom);
  const double ke_old = kinetic_energy(oldst.rho, oldst.p_mom);

  const int nd = mat.base().ndof();
  std::vector<double> warm(n * nd);
  for (long c = 0; c < n; ++c)
    mat.base().pack(newst.F[c], newst.H[c], newst.J[c], warm.data() + c * nd);

  // regularized stored energy and its gradient field (for the delta pairing)
  std::vector<EnergyDerivs> derivs(n);
  std::vector<double> t(n);
  parallel_for(n, [&](long c) {
    derivs[c] = mat.eval(newst.F[c], newst.H[c], newst.J[c], warm.data() + c * nd);
    t[c] = derivs[c].value;
  });
  r.stored = pairwise_sum(t) * g.cell_volume;

  std::vector<double> warm_old(n * nd);
  for (long c = 0; c < n; ++c)
    mat.base().pack(oldst.F[c], oldst.H[c], oldst.J[c], warm_old.data() + c * nd);
  parallel_for(n, [&](long c) {
    t[c] = mat.eval(oldst.F[c], oldst.H[c], oldst.J[c], warm_old.data() + c * nd)
               .value;
  });
  const double se_old = pairwise_sum(t) * g.cell_volume;

  r.diss_stokes = stokes_dissipation(grad_v, par.K_V, par.G_V);
  r.diss_hyper = hyperstress_dissipation(v, par.mu, par.p_exp, kTv);
  r.diss_eps0 = eps0_dissipation(v, par.eps, par.p_exp);

  if (par.R > 0.0) {
    const double G_M = 1.0 / par.R;
    for (long c = 0; c < n; ++c) t[c] = G_M * newst.Pi[c].norm2();
    r.diss_maxwell = pairwise_sum(t) * g.cell_volume;
    if (par.nu > 0.0) {
      std::vector<double> tq(n, 0.0);
      g.for_each([&](long idx, int i, int j, int k) {
        double n2 = 0.0;
        for (int d = 0; d < g.dims; ++d) {
          const DevTensor3 dp =
              (at_shift(newst.Pi, i, j, k, d, +1) - newst.Pi[idx]) * (1.0 / g.h[d]);
          n2 += dp.norm2();
        }
        tq[idx] = par.nu * std::pow(n2, 0.5 * par.q_exp);
      });
      r.diss_pi_grad = pairwise_sum(tq) * g.cell_volume;
    }
  }

  if (par.delta > 0.0) {
    // sum_faces (G(U+) - G(U)) . (U+ - U) / h^2, the exact pairing of the
    // compact delta-Laplacians with the energy gradient; >= 0 by monotonicity
    std::vector<double> face(n, 0.0);
    g.for_each([&](long idx, int i, int j, int k) {
      double acc = 0.0;
      for (int d = 0; d < g.dims; ++d) {
        bool mir = false;
        const long nb = g.neighbor(i, j, k, d, +1, mir);
        if (g.topology == Topology::Box && mir) continue;
        const double w = 1.0 / (g.h[d] * g.h[d]);
        acc += w * ddot(derivs[nb].dF - derivs[idx].dF, newst.F[nb] - newst.F[idx]);
        acc += w * (derivs[nb].dJ - derivs[idx].dJ) * (newst.J[nb] - newst.J[idx]);
        if (newst.has_H)
          acc += w * ddot(derivs[nb].dH - derivs[idx].dH, newst.H[nb] - newst.H[idx]);
      }
      face[idx] = acc;
    });
    r.diss_delta_grad = par.delta * pairwise_sum(face) * g.cell_volume;
  }

  r.gravity_power = gravity_power(newst.rho, v, g_mid);
  r.mass = mass(newst);
  const DensityBounds b = density_bounds(newst);
  r.min_rho = b.min_rho;
  r.max_rho = b.max_rho;
  r.min_J = min_jacobian(newst);
  r.jac_drift = jacobian_drift(newst);

  r.inequality_slack = (r.kinetic + r.stored) - (ke_old + se_old) +
                       tau * r.total_dissipation() - tau * r.gravity_power;
  return r;
}

std::string audit_csv_header() {
  return "time,tau,kinetic,stored,diss_stokes,diss_hyper,diss_maxwell,"
         "diss_pi_grad,diss_eps0,diss_delta_grad,gravity_power,"
         "inequality_slack,slack_budget,mass,min_rho,max_rho,min_J,jac_drift";
}

std::string audit_csv_row(const EnergyReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.time << ',' << r.tau << ',' << r.kinetic << ',' << r.stored << ','
     << r.diss_stokes << ',' << r.diss_hyper << ',' << r.diss_maxwell << ','
     << r.diss_pi_grad << ',' << r.diss_eps0 << ',' << r.diss_delta_grad << ','
     << r.gravity_power << ',' << r.inequality_slack << ',' << r.slack_budget
     << ',' << r.mass << ',' << r.min_rho << ',' << r.max_rho << ',' << r.min_J
     << ',' << r.jac_drift;
  return os.str();
}

ConvergenceResult convergence_study(const std::vector<double>& taus,
                                    const std::function<DVec(double)>& run) {
  if (taus.size() < 3)
    throw DomainError("convergence_study: need at least 3 tau values");
  ConvergenceResult res;
  res.taus = taus;
  const DVec ref = run(taus.back());
  for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
    const DVec xi = run(taus[i]);
    if (xi.size() != ref.size())
      throw DomainError("convergence_study: state size mismatch between runs");
    double e = 0.0;
    for (std::size_t q = 0; q < xi.size(); ++q)
      e += (xi[q] - ref[q]) * (xi[q] - ref[q]);
    res.errors.push_back(std::sqrt(e));
  }
  for (std::size_t i = 0; i + 1 < res.errors.size(); ++i)
    res.orders.push_back(std::log2(res.errors[i] / res.errors[i + 1]));
  return res;
}

}  // namespace eulervisc
