// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eulervisc/audit.hpp"
#include "eulervisc/util.hpp"
#include "test_util.hpp"

using namespace eulervisc;

namespace {

Grid small_grid(int n, int dims = 2) {
  std::array<int, 3> nn{n, dims > 1 ? n : 1, dims > 2 ? n : 1};
  std::array<double, 3> h{1.0 / n, 1.0 / n, 1.0 / n};
  return Grid::make(dims, nn, h, Topology::Periodic);
}

SchemeParams quiet_params() {
  SchemeParams p;
  p.tau = 1e-3;
  p.eps = 1e-6;
  p.delta = 1e-4;
  p.mu = 1e-4;
  p.K_V = 0.5;
  p.G_V = 0.5;
  p.R = 0.0;
  p.rho_max = 6.0;
  return p;
}

StateSmall uniform_state(const Grid& g, double rho, const Vec3& v,
                         const SymTensor3& E) {
  StateSmall s(g);
  for (long c = 0; c < g.ncells; ++c) {
    s.rho[c] = rho;
    s.p_mom[c] = rho * v;
    s.E[c] = E;
  }
  return s;
}

StateSmall smooth_state(const Grid& g, double amp, unsigned seed) {
  auto r = evt::rng(seed);
  StateSmall s(g);
  const double c1 = evt::uniform(r), c2 = evt::uniform(r), c3 = evt::uniform(r);
  g.for_each([&](long c, int i, int j, int) {
    const double x = g.coord(0, i), y = g.coord(1, j);
    const double sx = std::sin(2 * M_PI * x), cy = std::cos(2 * M_PI * y);
    s.rho[c] = 1.0 + amp * c1 * sx * cy;
    const Vec3 v{amp * c2 * cy, amp * c3 * sx, 0.0};
    s.p_mom[c] = s.rho[c] * v;
    s.E[c].e[SymTensor3::XY] = 0.5 * amp * sx;
    s.E[c].e[SymTensor3::XX] = 0.3 * amp * cy;
  });
  return s;
}

}  // namespace

TEST_CASE("equilibrium is a fixed point") {
  const Grid g = small_grid(8);
  const IsotropicQuadraticEnergy mat(1.0, 1.0);
  const StateSmall s0 = uniform_state(g, 1.0, Vec3{}, SymTensor3::zero());
  std::vector<SmallStepRecord> rec;
  const StateSmall s1 = step_small(s0, mat, quiet_params(), nullptr, &rec);
  double diff = 0.0;
  for (long c = 0; c < g.ncells; ++c) {
    diff = std::max(diff, std::abs(s1.rho[c] - 1.0));
    diff = std::max(diff, s1.p_mom[c].norm());
    diff = std::max(diff, s1.E[c].norm());
  }
  CHECK(diff <= 1e-12);
  CHECK(rec.size() == 1);
  CHECK(rec[0].stats.newton_iters <= 1);
  CHECK(std::abs(rec[0].report.inequality_slack) <= rec[0].report.slack_budget);
}

TEST_CASE("uniform-state relaxation ODE: backward Euler in closed form") {
  // All gradients vanish on a uniform periodic state, so the E-equation
  // reduces to (E^k - E^{k-1})/tau = -R dev phi'(E^k); for traceless E this is
  // E^k = E^{k-1} / (1 + 2 R G_E tau).
  const Grid g = small_grid(4);
  const IsotropicQuadraticEnergy mat(2.0, 0.8);
  SchemeParams p = quiet_params();
  p.R = 0.7;
  p.tau = 0.05;
  SymTensor3 E0;
  E0.e[SymTensor3::XY] = 0.3;
  E0.e[SymTensor3::XX] = 0.2;
  E0.e[SymTensor3::YY] = -0.2;
  StateSmall s = uniform_state(g, 1.0, Vec3{}, E0);
  const double factor = 1.0 / (1.0 + 2.0 * p.R * mat.G_E * p.tau);
  double expect = E0.e[SymTensor3::XY];
  for (int k = 0; k < 5; ++k) {
    s = step_small(s, mat, p, nullptr);
    expect *= factor;
    CHECK(s.E[0].e[SymTensor3::XY] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("uniform gravity free fall matches the scalar oracle") {
  const Grid g = small_grid(4);
  const IsotropicQuadraticEnergy mat(1.0, 1.0);
  SchemeParams p = quiet_params();
  p.eps = 0.0;
  p.delta = 0.0;
  p.tau = 0.01;
  const double rho0 = 2.0;
  StateSmall s = uniform_state(g, rho0, Vec3{0.1, 0, 0}, SymTensor3::zero());
  GravityFn gfun = [](double t, const Vec3&) { return Vec3{std::sin(t), 0.0, 0.0}; };
  // scalar implicit-Euler oracle with the same midpoint quadrature
  double p_oracle = rho0 * 0.1;
  double t = 0.0;
  for (int k = 0; k < 10; ++k) {
    s = step_small(s, mat, p, gfun);
    p_oracle += p.tau * rho0 * std::sin(t + 0.5 * p.tau);
    t += p.tau;
    CHECK(s.p_mom[0].x == doctest::Approx(p_oracle).epsilon(1e-12));
    CHECK(s.rho[0] == doctest::Approx(rho0).epsilon(1e-14));
  }
}

TEST_CASE("residual is tau-consistent on the passive-advection exact solution") {
  // rho(t,x) = 1 + a sin(2 pi (x - U t)), v = U const, E = 0 solves the system
  // with eps = delta = 0; the scheme residual at exact snapshots is O(tau+h^2).
  const int n = 256;
  const Grid g = small_grid(n, 1);
  const IsotropicQuadraticEnergy mat(1.0, 1.0);
  SchemeParams p = quiet_params();
  p.eps = 0.0;
  p.delta = 0.0;
  p.rho_max = 6.0;

  auto exact = [&](double t) {
    StateSmall s(g);
    g.for_each([&](long c, int i, int, int) {
      const double x = g.coord(0, i);
      s.rho[c] = 1.0 + 0.4 * std::sin(2 * M_PI * (x - 0.7 * t));
      s.p_mom[c] = s.rho[c] * Vec3{0.7, 0.0, 0.0};
    });
    s.time = t;
    return s;
  };

  const Field<Vec3> gzero(g);
  double res_norm[3];
  int idx = 0;
  for (double tau : {8e-3, 4e-3, 2e-3}) {
    const StateSmall sold = exact(0.1);
    const StateSmall snew = exact(0.1 + tau);
    DVec x, r;
    pack_state_small(snew, x);
    const double scales[3] = {tau, tau, tau};  // physical residual
    REQUIRE(residual_small(x, sold, mat, p, tau, gzero, scales, r));
    double s2 = 0.0;
    for (double v : r) s2 += v * v;
    res_norm[idx++] = std::sqrt(s2 * g.cell_volume);
  }
  CHECK(res_norm[0] / res_norm[1] > 1.8);
  CHECK(res_norm[0] / res_norm[1] < 2.2);
  CHECK(res_norm[1] / res_norm[2] > 1.8);
  CHECK(res_norm[1] / res_norm[2] < 2.2);
}

TEST_CASE("mass conservation and energy inequality on a smooth run") {
  const Grid g = small_grid(12);
  const IsotropicQuadraticEnergy mat(1.0, 0.6);
  SchemeParams p = quiet_params();
  p.R = 0.4;
  StateSmall s = smooth_state(g, 0.2, 7);
  const double m0 = mass(s);
  for (int k = 0; k < 8; ++k) {
    std::vector<SmallStepRecord> rec;
    s = step_small(s, mat, p, nullptr, &rec);
    for (const auto& rr : rec) {
      CHECK(std::abs(rr.report.mass - m0) <= 1e-12 * m0);
      CHECK(rr.report.inequality_slack <= rr.report.slack_budget);
      CHECK(rr.report.min_rho > 0.0);
      CHECK(rr.report.max_rho <= p.rho_max + 1.0);
    }
  }
}

TEST_CASE("spin term is energy-neutral (isotropy commutation on the grid)") {
  const Grid g = small_grid(10);
  const IsotropicQuadraticEnergy mat(1.3, 0.9);
  StateSmall s = smooth_state(g, 0.3, 11);
  const Field<Vec3> v = [&] {
    Field<Vec3> out(g);
    for (long c = 0; c < g.ncells; ++c) out[c] = s.p_mom[c] * (1.0 / s.rho[c]);
    return out;
  }();
  const Field<Tensor3> gv = grad_c(v);
  std::vector<double> t(g.ncells);
  double scale = 0.0;
  for (long c = 0; c < g.ncells; ++c) {
    const Tensor3 W = skw(gv[c]);
    const Tensor3 Ef = s.E[c].full();
    const Tensor3 S = dphi_small(s.E[c], mat).full();
    t[c] = ddot(S, W * Ef - Ef * W);
    scale = std::max(scale, S.norm() * W.norm() * Ef.norm());
  }
  CHECK(std::abs(pairwise_sum(t) * g.cell_volume) <= 1e-10 * (scale + 1.0));
}

TEST_CASE("cut-off function") {
  CHECK(cutoff_K(3.0, 6.0) == 1.0);
  CHECK(cutoff_K(-1.0, 6.0) == 0.0);
  CHECK(cutoff_K(8.0, 6.0) == 0.0);
  const double mid = cutoff_K(6.5, 6.0);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  // C1 monotone in the band
  double prev = 1.0;
  for (double rho = 6.0; rho <= 7.0; rho += 0.01) {
    const double k = cutoff_K(rho, 6.0);
    CHECK(k <= prev + 1e-12);
    prev = k;
  }
  // K(rho) rho is Lipschitz with the reported constant
  const double L = cutoff_K_rho_lipschitz(6.0);
  for (double rho = -2.0; rho < 8.0; rho += 0.013) {
    const double d = (cutoff_K_rho(rho + 1e-6, 6.0) - cutoff_K_rho(rho, 6.0)) / 1e-6;
    CHECK(std::abs(d) <= L + 1e-3);
  }
}

TEST_CASE("parameter validation names the hypotheses") {
  SchemeParams p = quiet_params();
  p.p_exp = 2.0;
  const auto v = p.validate(false);
  REQUIRE(!v.empty());
  bool found = false;
  for (const auto& s : v)
    if (s.find("p > 3") != std::string::npos) found = true;
  CHECK(found);
  CHECK_THROWS_AS(p.require_valid(false), ValidationError);
  p.unsafe_override = true;
  CHECK_NOTHROW(p.require_valid(false));
}
