// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eulervisc/audit.hpp"
#include "test_util.hpp"

using namespace eulervisc;

namespace {

Grid small_grid(int n, int dims = 2) {
  std::array<int, 3> nn{n, dims > 1 ? n : 1, dims > 2 ? n : 1};
  std::array<double, 3> h{1.0 / n, 1.0 / n, 1.0 / n};
  return Grid::make(dims, nn, h, Topology::Periodic);
}

SchemeParams kv_params() {
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

StateLarge smooth_large(const Grid& g, double amp, unsigned seed,
                        HCalibration cal = HCalibration::None, double alpha = 0.0) {
  auto r = evt::rng(seed);
  Field<double> rho(g);
  Field<Vec3> v(g);
  Field<Tensor3> F(g);
  const double c1 = evt::uniform(r), c2 = evt::uniform(r), c3 = evt::uniform(r);
  g.for_each([&](long c, int i, int j, int) {
    const double x = g.coord(0, i), y = g.coord(1, j);
    const double sx = std::sin(2 * M_PI * x), cy = std::cos(2 * M_PI * y);
    rho[c] = 1.0 + amp * c1 * sx * cy;
    v[c] = {amp * c2 * cy, amp * c3 * sx, 0.0};
    F[c] = Tensor3::identity();
    F[c](0, 1) = 0.5 * amp * sx;
    F[c](0, 0) = 1.0 + 0.3 * amp * cy;
  });
  return make_initial_large(rho, v, F, cal, alpha);
}

}  // namespace

TEST_CASE("make_initial_large") {
  const Grid g = small_grid(4);
  Field<double> rho(g, 1.0);
  Field<Vec3> v(g);
  SUBCASE("identity deformation") {
    Field<Tensor3> F(g, Tensor3::identity());
    const StateLarge a = make_initial_large(rho, v, F, HCalibration::CofF);
    CHECK(a.J[0] == 1.0);
    CHECK((a.H[0] - Tensor3::identity()).norm() == 0.0);
    const StateLarge b =
        make_initial_large(rho, v, F, HCalibration::PowerJTimesF, -5.0 / 6.0);
    CHECK((b.H[0] - Tensor3::identity()).norm() == 0.0);
  }
  SUBCASE("diag(2,1,1)") {
    Field<Tensor3> F(g, Tensor3::diag(2, 1, 1));
    const StateLarge a = make_initial_large(rho, v, F, HCalibration::CofF);
    CHECK(a.J[0] == doctest::Approx(2.0));
    CHECK((a.H[0] - Tensor3::diag(1, 2, 2)).norm() <= 1e-14);
  }
  SUBCASE("singular F0 is rejected") {
    Field<Tensor3> F(g, Tensor3::identity());
    F[3] = Tensor3::diag(1, 1, 0);
    CHECK_THROWS_AS(
        (void)make_initial_large(rho, v, F, HCalibration::None), DomainError);
  }
}

TEST_CASE("solve_pi") {
  const Grid g = small_grid(8);
  auto r = evt::rng(3);
  SUBCASE("zero Mandel stress gives zero Pi") {
    Field<Tensor3> M(g);
    const Field<DevTensor3> Pi = solve_pi(M, 0.0, 4.0, 2.0);
    for (long c = 0; c < g.ncells; ++c) CHECK(Pi[c].norm() == 0.0);
  }
  SUBCASE("nu = 0 is the pointwise algebraic inversion, bitwise") {
    Field<Tensor3> M(g);
    for (long c = 0; c < g.ncells; ++c) M[c] = evt::random_tensor(r);
    const double G_M = 1.7;
    const Field<DevTensor3> Pi = solve_pi(M, 0.0, 4.0, G_M);
    for (long c = 0; c < g.ncells; ++c) {
      const DevTensor3 expect = dev_part(M[c]) * (-1.0 / G_M);
      for (int q = 0; q < 5; ++q) CHECK(Pi[c].e[q] == expect.e[q]);
    }
  }
  SUBCASE("constant M over a periodic grid: gradient term inactive") {
    Field<Tensor3> M(g, evt::random_tensor(r));
    const double G_M = 2.0;
    const Field<DevTensor3> a = solve_pi(M, 0.0, 4.0, G_M);
    const Field<DevTensor3> b = solve_pi(M, 0.5, 4.0, G_M, 1e-14);
    for (long c = 0; c < g.ncells; ++c) CHECK((a[c] - b[c]).norm() <= 1e-10);
  }
  SUBCASE("nu > 0 with q <= 3 violates the hypothesis") {
    Field<Tensor3> M(g);
    CHECK_THROWS_AS((void)solve_pi(M, 0.5, 3.0, 1.0), DomainError);
  }
}

TEST_CASE("single-cell backward-Euler kinematics under prescribed grad v") {
  // F-update: F^k = F^{k-1}/(1 - a tau); J-update: J^k = J^{k-1}/(1 - 3 a tau);
  // note det F^k != J^k, the discrete drift of the scheme.
  const double a = 0.4, tau = 0.05;
  const Tensor3 gv = Tensor3::diag(a, a, a);
  Tensor3 F = Tensor3::identity();
  double J = 1.0;
  for (int k = 0; k < 4; ++k) {
    const Tensor3 Fk = F * (1.0 / (1.0 - a * tau));
    CHECK(kinematic_residual_F(Fk, F, tau, gv, DevTensor3::zero()).norm() <= 1e-12);
    const double Jk = J / (1.0 - 3.0 * a * tau);
    CHECK(std::abs(kinematic_residual_J(Jk, J, tau, 3.0 * a)) <= 1e-12);
    F = Fk;
    J = Jk;
  }
  CHECK(std::abs(det(F) - J) > 1e-5);  // the drift is real at this tau

  // rigid rotation: div v = 0 forces J^k = J^{k-1}
  Tensor3 spin;
  spin(0, 1) = 1.0;
  spin(1, 0) = -1.0;
  CHECK(kinematic_residual_J(1.3, 1.3, tau, spin.trace()) == 0.0);
}

TEST_CASE("H-kinematics helpers are consistent with their calibrations") {
  // advance F by backward Euler under constant grad v and check that the
  // H carried by the helper residual tracks Cof F (resp. J^a F) to O(tau)
  auto advance = [](HCalibration cal, double alpha, double tau, int steps) {
    Tensor3 gv;
    gv(0, 0) = 0.3;
    gv(0, 1) = 0.2;
    gv(1, 1) = -0.1;
    Tensor3 F = Tensor3::identity();
    double J = 1.0;
    Tensor3 H;
    switch (cal) {
      case HCalibration::CofF: H = cof(F); break;
      case HCalibration::PowerJTimesF: H = std::pow(J, alpha) * F; break;
      case HCalibration::MooneyRivlinCof: H = std::pow(J, -7.0 / 6.0) * cof(F); break;
      default: H = Tensor3::identity();
    }
    for (int k = 0; k < steps; ++k) {
      // implicit solves in closed form: F^k (I/tau - gv) = F^{k-1}/tau
      const Tensor3 A = inv(Tensor3::identity() * (1.0 / tau) - gv);
      const Tensor3 Fk = A * F * (1.0 / tau);
      const double Jk = J / (1.0 - tau * gv.trace());
      // solve the linear H-update:  H^k/tau - kin(H^k) = H^{k-1}/tau
      Tensor3 Hk = H;  // fixed-point iteration on the linear equation
      for (int it = 0; it < 200; ++it) {
        const Tensor3 res =
            kinematic_residual_H(Hk, H, tau, gv, DevTensor3::zero(), Fk, Jk, cal,
                                 alpha);
        Hk -= res * tau;
        if (res.norm() < 1e-14) break;
      }
      F = Fk;
      J = Jk;
      H = Hk;
    }
    Tensor3 target;
    switch (cal) {
      case HCalibration::CofF: target = cof(F); break;
      case HCalibration::PowerJTimesF: target = std::pow(J, alpha) * F; break;
      case HCalibration::MooneyRivlinCof:
        target = std::pow(J, -7.0 / 6.0) * cof(F);
        break;
      default: target = Tensor3::identity();
    }
    return (H - target).norm();
  };
  for (HCalibration cal : {HCalibration::CofF, HCalibration::PowerJTimesF,
                           HCalibration::MooneyRivlinCof}) {
    const double alpha = cal == HCalibration::PowerJTimesF ? -5.0 / 6.0 : 0.0;
    const double e1 = advance(cal, alpha, 0.02, 10);   // T = 0.2
    const double e2 = advance(cal, alpha, 0.01, 20);   // same T, tau halved
    CHECK(e1 > 0.0);
    const double ratio = e1 / e2;
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.6);
  }
}

TEST_CASE("equilibrium at the identity is a fixed point") {
  const Grid g = small_grid(6);
  auto nh = std::make_shared<NeoHookean>(1.0, 1.0);
  YosidaRegularizedEnergy re(nh, 1e-6, 1e-4, RegularizationMode::FullProx);
  Field<double> rho(g, 1.0);
  Field<Vec3> v(g);
  Field<Tensor3> F(g, Tensor3::identity());
  StateLarge s0 = make_initial_large(rho, v, F, HCalibration::None);
  std::vector<LargeStepRecord> rec;
  const StateLarge s1 = step_large(s0, re, kv_params(), nullptr, &rec);
  double diff = 0.0;
  for (long c = 0; c < g.ncells; ++c) {
    diff = std::max(diff, std::abs(s1.rho[c] - 1.0));
    diff = std::max(diff, s1.p_mom[c].norm());
    diff = std::max(diff, (s1.F[c] - Tensor3::identity()).norm());
    diff = std::max(diff, std::abs(s1.J[c] - 1.0));
  }
  CHECK(diff <= 1e-10);
  REQUIRE(rec.size() == 1);
  CHECK(rec[0].report.jac_drift <= 1e-10);
}

TEST_CASE("Kelvin-Voigt run: mass, bounds, energy inequality, J drift order") {
  const Grid g = small_grid(8);
  auto nh = std::make_shared<NeoHookean>(1.0, 1.0);
  YosidaRegularizedEnergy re(nh, 1e-6, 1e-4, RegularizationMode::FullProx);
  SchemeParams p = kv_params();
  StateLarge s = smooth_large(g, 0.1, 5);
  const double m0 = mass(s);
  for (int k = 0; k < 5; ++k) {
    std::vector<LargeStepRecord> rec;
    s = step_large(s, re, p, nullptr, &rec);
    for (const auto& rr : rec) {
      CHECK(std::abs(rr.report.mass - m0) <= 1e-12 * m0);
      CHECK(rr.report.inequality_slack <= rr.report.slack_budget);
      CHECK(rr.report.min_J > 0.0);
    }
  }

  // drift halves with tau (delta = 0, first-order consistency of both updates)
  YosidaRegularizedEnergy re0(nh, 1e-6, 0.0, RegularizationMode::FullProx);
  auto drift_at = [&](double tau, int steps) {
    SchemeParams pp = kv_params();
    pp.delta = 0.0;
    pp.tau = tau;
    StateLarge st = smooth_large(g, 0.1, 6);
    for (int k = 0; k < steps; ++k) st = step_large(st, re0, pp, nullptr);
    return jacobian_drift(st);
  };
  const double d1 = drift_at(4e-3, 5);
  const double d2 = drift_at(2e-3, 10);
  CHECK(d1 > 0.0);
  CHECK(d1 / d2 > 1.5);
  CHECK(d1 / d2 < 2.7);
}

TEST_CASE("Jeffreys run satisfies the energy inequality") {
  const Grid g = small_grid(6);
  auto nh = std::make_shared<NeoHookean>(1.0, 1.0);
  YosidaRegularizedEnergy re(nh, 1e-6, 1e-4, RegularizationMode::FullProx);
  SchemeParams p = kv_params();
  p.R = 0.5;
  p.nu = 1e-3;
  p.q_exp = 4.0;
  StateLarge s = smooth_large(g, 0.08, 9);
  for (int k = 0; k < 3; ++k) {
    std::vector<LargeStepRecord> rec;
    s = step_large(s, re, p, nullptr, &rec);
    for (const auto& rr : rec) {
      CHECK(rr.report.inequality_slack <= rr.report.slack_budget);
      CHECK(rr.report.diss_maxwell >= 0.0);
      CHECK(rr.report.diss_pi_grad >= 0.0);
    }
  }
  // Pi stays structurally trace-free
  for (long c = 0; c < g.ncells; ++c)
    CHECK(s.Pi[c].full().trace() == 0.0);
}

TEST_CASE("reference-frame rotation invariance of the energy series") {
  const Grid g = small_grid(6);
  auto nh = std::make_shared<NeoHookean>(1.0, 1.0);
  YosidaRegularizedEnergy re(nh, 1e-6, 0.0, RegularizationMode::FullProx);
  SchemeParams p = kv_params();
  p.delta = 0.0;
  auto r = evt::rng(13);
  const Tensor3 Q = evt::random_rotation(r);

  auto series = [&](bool rotate) {
    StateLarge s = smooth_large(g, 0.1, 14);
    if (rotate)
      for (long c = 0; c < g.ncells; ++c) s.F[c] = s.F[c] * Q;
    std::vector<double> stored;
    for (int k = 0; k < 4; ++k) {
      std::vector<LargeStepRecord> rec;
      s = step_large(s, re, p, nullptr, &rec);
      for (const auto& rr : rec) stored.push_back(rr.report.stored);
    }
    return stored;
  };
  const auto a = series(false);
  const auto b = series(true);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(evt::rel_err(b[i], a[i]) <= 1e-10);
}
