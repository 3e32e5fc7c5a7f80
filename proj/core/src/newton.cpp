// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/newton.hpp"

#include <cmath>

namespace eulervisc {

namespace {

double nrm2(const DVec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void axpy(double a, const DVec& x, DVec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

/// Matrix-free J*v by one-sided differencing of the residual.
struct Jacobian {
  const ResidualFn& f;
  const DVec& x;
  const DVec& r0;
  double xnorm;
  mutable DVec xp, rp;
  mutable int evals = 0;

  bool apply(const DVec& v, DVec& out) const {
    const double vn = nrm2(v);
    if (vn == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return true;
    }
    double sigma = 1e-8 * (1.0 + xnorm) / vn;
    for (int attempt = 0; attempt < 4; ++attempt) {
      xp = x;
      axpy(sigma, v, xp);
      if (f(xp, rp)) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (rp[i] - r0[i]) / sigma;
        ++evals;
        return true;
      }
      sigma *= 0.25;  // probe left the domain; shrink
    }
    return false;
  }
};

/// Restarted GMRES for J s = -r0.  Returns the relative residual achieved.
double gmres(const Jacobian& J, const DVec& r0, DVec& s, int restart, int maxit,
             double rtol, int& iters) {
  const std::size_t n = r0.size();
  s.assign(n, 0.0);
  const double bnorm = nrm2(r0);
  if (bnorm == 0.0) return 0.0;

  DVec w(n), res(n);
  double rel = 1.0;
  int done = 0;
  while (done < maxit && rel > rtol) {
    // current residual of J s = -r0:  res = -r0 - J s
    if (done == 0) {
      for (std::size_t i = 0; i < n; ++i) res[i] = -r0[i];
    } else {
      if (!J.apply(s, w)) break;
      for (std::size_t i = 0; i < n; ++i) res[i] = -r0[i] - w[i];
    }
    double beta = nrm2(res);
    rel = beta / bnorm;
    if (rel <= rtol) break;

    const int m = restart;
    std::vector<DVec> V;
    V.reserve(m + 1);
    DVec v0 = res;
    for (auto& x : v0) x /= beta;
    V.push_back(v0);
    std::vector<double> H((m + 1) * m, 0.0);
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && done < maxit; ++k, ++done) {
      if (!J.apply(V[k], w)) break;
      for (int i = 0; i <= k; ++i) {  // modified Gram-Schmidt
        double hik = 0.0;
        for (std::size_t q = 0; q < n; ++q) hik += w[q] * V[i][q];
        H[i * m + k] = hik;
        for (std::size_t q = 0; q < n; ++q) w[q] -= hik * V[i][q];
      }
      const double hkk = nrm2(w);
      if (k + 1 <= m) H[(k + 1) * m + k] = hkk;
      if (hkk > 0.0) {
        DVec vk = w;
        for (auto& x : vk) x /= hkk;
        V.push_back(vk);
      }
      // Givens rotations
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[i * m + k] + sn[i] * H[(i + 1) * m + k];
        H[(i + 1) * m + k] = -sn[i] * H[i * m + k] + cs[i] * H[(i + 1) * m + k];
        H[i * m + k] = t;
      }
      const double denom = std::hypot(H[k * m + k], H[(k + 1) * m + k]);
      if (denom == 0.0) {
        ++k;
        break;
      }
      cs[k] = H[k * m + k] / denom;
      sn[k] = H[(k + 1) * m + k] / denom;
      H[k * m + k] = denom;
      H[(k + 1) * m + k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      rel = std::abs(g[k + 1]) / bnorm;
      if (rel <= rtol || hkk == 0.0) {
        ++k;
        break;
      }
    }
    // back substitution on the k x k triangular system
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double t = g[i];
      for (int j = i + 1; j < k; ++j) t -= H[i * m + j] * y[j];
      y[i] = H[i * m + i] != 0.0 ? t / H[i * m + i] : 0.0;
    }
    for (int i = 0; i < k; ++i) axpy(y[i], V[i], s);
    if (k == 0) break;  // Jacobian probe failed; give whatever we have
  }
  iters += done;
  return rel;
}

}  // namespace

SolveStats newton_krylov(const ResidualFn& f, DVec& x, const NewtonOptions& opt) {
  SolveStats st;
  const std::size_t n = x.size();
  DVec r(n), xt(n), rt(n), s(n);
  if (!f(x, r))
    throw SolverError("newton_krylov: initial guess outside the domain");
  double rn = nrm2(r);
  st.residual0 = rn;
  const double tol = opt.tol_abs * opt.scale_hint + opt.tol_rel * rn;
  st.tol_used = tol;

  for (int it = 0; it < opt.max_iter; ++it) {
    if (rn <= tol) {
      st.converged = true;
      break;
    }
    st.newton_iters = it + 1;
    Jacobian J{f, x, r, nrm2(x), DVec(n), DVec(n)};
    gmres(J, r, s, opt.gmres_restart, opt.gmres_max_iter,
          std::max(opt.forcing, tol / (rn + 1e-300) * 0.1), st.krylov_iters);

    // Armijo backtracking on |r|^2 with domain guard
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xt = x;
      axpy(t, s, xt);
      const bool ok = f(xt, rt) && (!opt.feasible || opt.feasible(xt));
      if (ok) {
        const double rtn = nrm2(rt);
        if (rtn * rtn <= (1.0 - 2e-4 * t) * rn * rn || rtn <= tol) {
          x.swap(xt);
          r.swap(rt);
          rn = rtn;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
      if (ls > 0) ++st.damping_events;
    }
    if (accepted) continue;

    // Fallback: damped Richardson sweeps on the (increment-scaled) residual.
    bool rescued = false;
    double omega = 0.5;
    for (int sweep = 0; sweep < 5 && !rescued; ++sweep, omega *= 0.5) {
      xt = x;
      axpy(-omega, r, xt);
      if (f(xt, rt) && (!opt.feasible || opt.feasible(xt))) {
        const double rtn = nrm2(rt);
        if (rtn < rn) {
          x.swap(xt);
          r.swap(rt);
          rn = rtn;
          rescued = true;
          ++st.picard_sweeps;
        }
      }
    }
    if (!rescued) {
      st.residual = rn;
      throw SolverError("newton_krylov: stalled (residual " + std::to_string(rn) +
                        ", tol " + std::to_string(tol) + ")");
    }
  }
  st.residual = rn;
  if (rn <= tol) st.converged = true;
  if (!st.converged)
    throw SolverError("newton_krylov: no convergence after max iterations "
                      "(residual " + std::to_string(rn) + ")");
  return st;
}

}  // namespace eulervisc
