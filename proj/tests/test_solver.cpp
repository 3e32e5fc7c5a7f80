// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eulervisc/newton.hpp"

using namespace eulervisc;

TEST_CASE("linear residual converges in one Newton iteration") {
  // r(x) = A x - b with a well-conditioned 4x4
  const double A[16] = {4, 1, 0, 0, 1, 5, 1, 0, 0, 1, 6, 1, 0, 0, 1, 7};
  const DVec b = {1.0, -2.0, 0.5, 3.0};
  auto fn = [&](const DVec& x, DVec& r) {
    r.resize(4);
    for (int i = 0; i < 4; ++i) {
      r[i] = -b[i];
      for (int j = 0; j < 4; ++j) r[i] += A[i * 4 + j] * x[j];
    }
    return true;
  };
  DVec x(4, 0.0);
  NewtonOptions opt;
  opt.tol_rel = 1e-8;
  opt.forcing = 1e-12;
  const SolveStats st = newton_krylov(fn, x, opt);
  CHECK(st.converged);
  CHECK(st.newton_iters == 1);
}

TEST_CASE("scalar cubic matches the bisection oracle") {
  const double bval = 7.3;
  auto fn = [&](const DVec& x, DVec& r) {
    r.assign(1, x[0] * x[0] * x[0] + x[0] - bval);
    return true;
  };
  // bisection oracle
  double lo = 0.0, hi = 3.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * mid + mid - bval > 0.0 ? hi : lo) = mid;
  }
  const double root = 0.5 * (lo + hi);

  DVec x = {1.0};
  NewtonOptions opt;
  opt.tol_rel = 1e-14;
  opt.tol_abs = 1e-14;
  const SolveStats st = newton_krylov(fn, x, opt);
  CHECK(st.converged);
  CHECK(std::abs(x[0] - root) <= 1e-10);
}

TEST_CASE("convergence is guess-independent") {
  auto fn = [](const DVec& x, DVec& r) {
    r.assign(1, std::tanh(x[0]) + 0.3 * x[0] - 0.2);
    return true;
  };
  NewtonOptions opt;
  opt.tol_rel = 1e-14;
  opt.tol_abs = 1e-15;
  DVec xa = {2.0}, xb = {-3.0};
  (void)newton_krylov(fn, xa, opt);
  (void)newton_krylov(fn, xb, opt);
  CHECK(std::abs(xa[0] - xb[0]) <= 1e-12);
}

TEST_CASE("domain guard makes infeasible probes rejected, not fatal") {
  // residual defined only for x > 0: r = log(x) - 1
  auto fn = [](const DVec& x, DVec& r) {
    if (!(x[0] > 0.0)) return false;
    r.assign(1, std::log(x[0]) - 1.0);
    return true;
  };
  DVec x = {0.5};
  NewtonOptions opt;
  opt.feasible = [](const DVec& x) { return x[0] > 0.0; };
  const SolveStats st = newton_krylov(fn, x, opt);
  CHECK(st.converged);
  CHECK(x[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("stall raises a SolverError with diagnostics") {
  // r(x) = 1 + x^2 has no root; the solver must give up cleanly
  auto fn = [](const DVec& x, DVec& r) {
    r.assign(1, 1.0 + x[0] * x[0]);
    return true;
  };
  DVec x = {0.0};
  NewtonOptions opt;
  opt.max_iter = 10;
  CHECK_THROWS_AS((void)newton_krylov(fn, x, opt), SolverError);
}
