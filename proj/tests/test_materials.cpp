// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eulervisc/materials.hpp"
#include "test_util.hpp"

using namespace eulervisc;

namespace {

/// FD gradient of phi_small (independent oracle for the analytic derivative).
SymTensor3 dphi_small_fd(const SymTensor3& E, const IsotropicQuadraticEnergy& m,
                         double h = 1e-6) {
  SymTensor3 out;
  for (int q = 0; q < 6; ++q) {
    SymTensor3 ep = E, em = E;
    ep.e[q] += h;
    em.e[q] -= h;
    double d = (phi_small(ep, m) - phi_small(em, m)) / (2.0 * h);
    if (q >= 3) d *= 0.5;  // packed off-diagonals carry both symmetric slots
    out.e[q] = d;
  }
  return out;
}

/// Central-difference gradient of a packed energy.
void grad_fd(const PolyconvexEnergy& e, const double* x, double* out) {
  const int n = e.ndof();
  std::vector<double> xp(x, x + n);
  for (int i = 0; i < n; ++i) {
    double h = 1e-6 * (1.0 + std::abs(x[i]));
    if (i == 9) h = std::min(h, 0.45 * x[9]);
    xp[i] = x[i] + h;
    const double vp = e.eval(xp.data(), nullptr);
    xp[i] = x[i] - h;
    const double vm = e.eval(xp.data(), nullptr);
    xp[i] = x[i];
    out[i] = (vp - vm) / (2.0 * h);
  }
}

void check_gradients(const PolyconvexEnergy& e, int npts, unsigned seed,
                     double tol = 1e-6) {
  auto r = evt::rng(seed);
  const int n = e.ndof();
  std::vector<double> x(n), ga(n), gf(n);
  for (int it = 0; it < npts; ++it) {
    const Tensor3 F = evt::random_deformation(r);
    const Tensor3 H = evt::random_deformation(r);
    const double J = evt::uniform(r, 0.5, 2.0);
    e.pack(F, H, J, x.data());
    (void)e.eval(x.data(), ga.data());
    grad_fd(e, x.data(), gf.data());
    double scale = 0.0;
    for (int q = 0; q < n; ++q) scale = std::max(scale, std::abs(ga[q]));
    for (int q = 0; q < n; ++q)
      CHECK(std::abs(ga[q] - gf[q]) <= tol * (scale + 1.0));
  }
}

/// phi(F) = phi_breve(F, H(F), det F); independent composition for stress
/// oracles.
double composed_phi(const PolyconvexEnergy& e, const Tensor3& F) {
  const double J = det(F);
  Tensor3 H;
  switch (e.calibration()) {
    case HCalibration::None: break;
    case HCalibration::CofF: H = cof(F); break;
    case HCalibration::PowerJTimesF: H = std::pow(J, e.alpha()) * F; break;
    case HCalibration::MooneyRivlinCof: H = std::pow(J, -7.0 / 6.0) * cof(F); break;
  }
  double x[19];
  e.pack(F, H, J, x);
  return e.eval(x, nullptr);
}

Tensor3 composed_dphi_fd(const PolyconvexEnergy& e, const Tensor3& F,
                         double h = 1e-6) {
  Tensor3 g;
  for (int q = 0; q < 9; ++q) {
    Tensor3 fp = F, fm = F;
    fp.e[q] += h;
    fm.e[q] -= h;
    g.e[q] = (composed_phi(e, fp) - composed_phi(e, fm)) / (2.0 * h);
  }
  return g;
}

/// Quadratic base energy used by the Yosida closed-form oracle.
class QuadraticEnergy : public PolyconvexEnergy {
 public:
  double eval(const double* x, double* grad) const override {
    double v = 0.0;
    for (int i = 0; i < 10; ++i) v += 0.5 * x[i] * x[i];
    if (grad)
      for (int i = 0; i < 10; ++i) grad[i] = x[i];
    return v;
  }
  void hessian(const double* x, double* h) const override {
    (void)x;
    for (int i = 0; i < 100; ++i) h[i] = 0.0;
    for (int i = 0; i < 10; ++i) h[i * 10 + i] = 1.0;
  }
  bool admissible(const double* x) const override { return x[9] > 0.0; }
  std::string name() const override { return "quadratic-test"; }
};

}  // namespace

TEST_CASE("small-strain energy and stress") {
  const IsotropicQuadraticEnergy m(2.0, 0.7);
  SUBCASE("minimum at zero strain") {
    CHECK(phi_small(SymTensor3::zero(), m) == 0.0);
    CHECK(dphi_small(SymTensor3::zero(), m).norm() == 0.0);
    CHECK(cauchy_small(SymTensor3::zero(), m).norm() == 0.0);
  }
  SUBCASE("spherical strain") {
    const double a = 0.13;
    const SymTensor3 E = SymTensor3::diag(a, a, a);
    CHECK(phi_small(E, m) == doctest::Approx(4.5 * m.K_E * a * a).epsilon(1e-13));
    CHECK((dphi_small(E, m) - SymTensor3::diag(3 * m.K_E * a, 3 * m.K_E * a,
                                               3 * m.K_E * a))
              .norm() <= 1e-14);
    const double tdiag = 3 * m.K_E * a + 4.5 * m.K_E * a * a;
    CHECK((cauchy_small(E, m) - SymTensor3::diag(tdiag, tdiag, tdiag)).norm() <=
          1e-14);
  }
  SUBCASE("traceless strain and the deviatoric stress") {
    auto r = evt::rng(3);
    const SymTensor3 E = dev_part(evt::random_sym(r)).sym();
    CHECK(evt::rel_err(phi_small(E, m), m.G_E * E.norm2()) <= 1e-12);
    CHECK((dphi_small(E, m) - 2.0 * m.G_E * E).norm() <= 1e-13);
    CHECK((dev_sym(cauchy_small(E, m)) - 2.0 * m.G_E * E).norm() <= 1e-12);
  }
  SUBCASE("analytic gradient matches finite differences") {
    auto r = evt::rng(4);
    for (int it = 0; it < 200; ++it) {
      const SymTensor3 E = evt::random_sym(r, 1.5);
      CHECK((dphi_small(E, m) - dphi_small_fd(E, m)).norm() <=
            1e-6 * (1.0 + dphi_small(E, m).norm()));
    }
  }
  SUBCASE("strong convexity phi >= alpha |E|^2") {
    auto r = evt::rng(5);
    for (int it = 0; it < 500; ++it) {
      const SymTensor3 E = evt::random_sym(r, 2.0);
      CHECK(phi_small(E, m) >= m.alpha() * E.norm2() - 1e-12);
    }
  }
}

TEST_CASE("finite-strain energies: analytic gradients vs finite differences") {
  check_gradients(NeoHookean(2.0, 1.0), 200, 11);
  check_gradients(NeoHookean(2.0, 1.0, 0.01, NeoHookean::Singular::InversePower, 2.0),
                  200, 12);
  check_gradients(MooneyRivlin(2.0, 1.0, 0.5), 200, 13);
  check_gradients(ReferentialNeoHookean(2.0, 1.0), 200, 14);
  check_gradients(BarotropicFluid(1.0, 2.0), 200, 15);
  check_gradients(FJPowerEnergy(0.5), 200, 16);
}

TEST_CASE("analytic hessians match finite differences of the gradient") {
  auto check_h = [](const PolyconvexEnergy& e, unsigned seed) {
    auto r = evt::rng(seed);
    const int n = e.ndof();
    std::vector<double> x(n), ha(n * n), hf(n * n);
    const Tensor3 F = evt::random_deformation(r);
    const Tensor3 H = evt::random_deformation(r);
    e.pack(F, H, evt::uniform(r, 0.6, 1.8), x.data());
    e.hessian(x.data(), ha.data());
    // force the finite-difference default from the base class
    e.PolyconvexEnergy::hessian(x.data(), hf.data());
    double scale = 0.0;
    for (int q = 0; q < n * n; ++q) scale = std::max(scale, std::abs(ha[q]));
    for (int q = 0; q < n * n; ++q)
      CHECK(std::abs(ha[q] - hf[q]) <= 2e-5 * (scale + 1.0));
  };
  check_h(NeoHookean(2.0, 1.0), 21);
  check_h(MooneyRivlin(2.0, 1.0, 0.5), 22);
  check_h(ReferentialNeoHookean(2.0, 1.0), 23);
  check_h(BarotropicFluid(1.0, 2.0), 24);
  check_h(FJPowerEnergy(0.5), 25);
}

TEST_CASE("neo-Hookean frame invariances") {
  const NeoHookean nh(3.0, 1.2);
  auto r = evt::rng(31);
  SUBCASE("minimum on SO(3)") {
    double x[10];
    nh.pack(Tensor3::identity(), Tensor3{}, 1.0, x);
    const double v0 = nh.eval(x, nullptr);
    for (int it = 0; it < 300; ++it) {
      const Tensor3 F = Tensor3::identity() + evt::random_tensor(r, 0.2);
      const double J = det(F);
      if (!(J > 0.0)) continue;
      nh.pack(F, Tensor3{}, J, x);
      CHECK(nh.eval(x, nullptr) >= v0 - 1e-12);
    }
  }
  SUBCASE("left rotation invariance phi(QF) = phi(F)") {
    for (int it = 0; it < 300; ++it) {
      const Tensor3 F = evt::random_deformation(r);
      const Tensor3 Q = evt::random_rotation(r);
      const double a = composed_phi(nh, F);
      const double b = composed_phi(nh, Q * F);
      CHECK(evt::rel_err(b, a) <= 1e-12);
    }
  }
}

TEST_CASE("Mooney-Rivlin with G_MR = 0 equals neo-Hookean bit-for-bit") {
  const NeoHookean nh(2.0, 1.0);
  const MooneyRivlin mr(2.0, 1.0, 0.0);
  auto r = evt::rng(41);
  for (int it = 0; it < 100; ++it) {
    const Tensor3 F = evt::random_deformation(r);
    const Tensor3 H = evt::random_deformation(r);
    const double J = evt::uniform(r, 0.5, 2.0);
    double xn[10], xm[19], gn[10], gm[19];
    nh.pack(F, Tensor3{}, J, xn);
    mr.pack(F, H, J, xm);
    const double vn = nh.eval(xn, gn);
    const double vm = mr.eval(xm, gm);
    CHECK(vm == vn);
    for (int q = 0; q < 10; ++q) CHECK(gm[q] == gn[q]);
    for (int q = 10; q < 19; ++q) CHECK(gm[q] == 0.0);
  }
}

TEST_CASE("Yosida envelope") {
  auto base = std::make_shared<QuadraticEnergy>();
  SUBCASE("closed form for the quadratic: Y_eps phi(x) = |x|^2/(2(1+eps))") {
    for (double eps : {0.3, 1.0, 2.5}) {
      YosidaRegularizedEnergy re(base, eps, 0.0, RegularizationMode::FullProx);
      auto r = evt::rng(51);
      for (int it = 0; it < 50; ++it) {
        const Tensor3 F = evt::random_tensor(r);
        const double J = evt::uniform(r, 0.2, 2.0);
        double x[10];
        base->pack(F, Tensor3{}, J, x);
        double n2 = 0.0;
        for (int q = 0; q < 10; ++q) n2 += x[q] * x[q];
        const EnergyDerivs d = re.eval(F, Tensor3{}, J);
        CHECK(evt::rel_err(d.value, 0.5 * n2 / (1.0 + eps)) <= 1e-10);
        // derivative x/(1+eps)
        for (int q = 0; q < 9; ++q)
          CHECK(std::abs(d.dF.e[q] - x[q] / (1.0 + eps)) <= 1e-10 * (1.0 + n2));
        CHECK(std::abs(d.dJ - x[9] / (1.0 + eps)) <= 1e-10 * (1.0 + n2));
      }
    }
  }
  SUBCASE("envelope never exceeds the base energy; monotone in eps") {
    auto nh = std::make_shared<NeoHookean>(2.0, 1.0);
    YosidaRegularizedEnergy r1(nh, 1e-3, 0.0, RegularizationMode::FullProx);
    YosidaRegularizedEnergy r2(nh, 1e-2, 0.0, RegularizationMode::FullProx);
    auto r = evt::rng(52);
    for (int it = 0; it < 10000; ++it) {
      const Tensor3 F = evt::random_deformation(r);
      const double J = evt::uniform(r, 0.3, 2.5);
      double x[10];
      nh->pack(F, Tensor3{}, J, x);
      const double base_v = nh->eval(x, nullptr);
      const double v1 = r1.eval(F, Tensor3{}, J).value;
      const double v2 = r2.eval(F, Tensor3{}, J).value;
      CHECK(v1 <= base_v + 1e-10 * (1.0 + std::abs(base_v)));
      CHECK(v2 <= v1 + 1e-10 * (1.0 + std::abs(v1)));
    }
  }
  SUBCASE("eps -> 0 convergence on a smooth convex point") {
    auto nh = std::make_shared<NeoHookean>(2.0, 1.0);
    const Tensor3 F = Tensor3::identity() + Tensor3::diag(0.1, -0.05, 0.02);
    const double J = 1.1;
    double x[10];
    nh->pack(F, Tensor3{}, J, x);
    const double base_v = nh->eval(x, nullptr);
    double prev_gap = HUGE_VAL;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
      YosidaRegularizedEnergy re(nh, eps, 0.0, RegularizationMode::FullProx);
      const double gap = base_v - re.eval(F, Tensor3{}, J).value;
      CHECK(gap >= -1e-12);
      CHECK(gap <= prev_gap + 1e-12);
      prev_gap = gap;
    }
    CHECK(prev_gap <= 1e-4 * (1.0 + std::abs(base_v)));
  }
  SUBCASE("envelope derivative matches finite differences of the value") {
    auto nh = std::make_shared<NeoHookean>(2.0, 1.0);
    YosidaRegularizedEnergy re(nh, 1e-4, 0.0, RegularizationMode::FullProx);
    auto r = evt::rng(53);
    for (int it = 0; it < 30; ++it) {
      const Tensor3 F = evt::random_deformation(r);
      const double J = evt::uniform(r, 0.5, 2.0);
      const EnergyDerivs d = re.eval(F, Tensor3{}, J);
      double x[10];
      nh->pack(F, Tensor3{}, J, x);
      double scale = 1.0 + d.dF.norm() + std::abs(d.dJ);
      for (int q = 0; q < 10; ++q) {
        double xp[10], xm[10];
        std::copy(x, x + 10, xp);
        std::copy(x, x + 10, xm);
        const double h = 1e-6 * (1.0 + std::abs(x[q]));
        xp[q] += h;
        xm[q] -= h;
        const double fd = (re.value(xp) - re.value(xm)) / (2.0 * h);
        const double an = q < 9 ? d.dF.e[q] : d.dJ;
        CHECK(std::abs(an - fd) <= 1e-6 * scale);
      }
    }
  }
  SUBCASE("simplified cap: untouched above the floor, linear C1 below") {
    auto ref = std::make_shared<ReferentialNeoHookean>(2.0, 1.0);
    YosidaRegularizedEnergy re(ref, 0.0, 0.0, RegularizationMode::SimpleCap);
    re.set_j_floor(0.4);
    re.reset_cap_flag();
    const Tensor3 F = Tensor3::identity(), H = Tensor3::identity();
    double x[19];
    ref->pack(F, H, 0.9, x);
    CHECK(re.eval(F, H, 0.9).value == doctest::Approx(ref->eval(x, nullptr)));
    CHECK(!re.cap_active());
    const EnergyDerivs lo = re.eval(F, H, 0.2);
    CHECK(re.cap_active());
    // linear extension: value and slope from the floor point
    const double s0 = ref->singular(0.4), s1 = ref->singular_prime(0.4);
    CHECK(lo.value == doctest::Approx(1.0 * 3.0 /*G|H|^2*/ + s0 + s1 * (0.2 - 0.4)));
    CHECK(lo.dJ == doctest::Approx(s1));
  }
  SUBCASE("prox rejects a non-convex base energy") {
    struct Concave : PolyconvexEnergy {
      double eval(const double* x, double* grad) const override {
        double v = 0.0;
        for (int i = 0; i < 10; ++i) v -= 0.5 * x[i] * x[i];
        if (grad)
          for (int i = 0; i < 10; ++i) grad[i] = -x[i];
        return v;
      }
      void hessian(const double*, double* h) const override {
        for (int i = 0; i < 100; ++i) h[i] = 0.0;
        for (int i = 0; i < 10; ++i) h[i * 10 + i] = -1.0;
      }
      bool admissible(const double*) const override { return true; }
      std::string name() const override { return "concave-test"; }
    };
    // enormous eps makes the prox objective follow the concave base
    YosidaRegularizedEnergy re(std::make_shared<Concave>(), 1e6, 0.0,
                               RegularizationMode::FullProx);
    CHECK_THROWS_AS((void)re.eval(Tensor3::identity(), Tensor3{}, 1.0),
                    SolverError);
  }
}

TEST_CASE("stress mappings") {
  SUBCASE("isotropic energy at the identity has zero Mandel stress") {
    auto nh = std::make_shared<NeoHookean>(2.0, 1.0);
    YosidaRegularizedEnergy re(nh, 0.0, 0.0, RegularizationMode::Direct);
    const Tensor3 M = stress_M(re, Tensor3::identity(), Tensor3{}, 1.0);
    CHECK(M.norm() <= 1e-14);
  }
  SUBCASE("barotropic fluid: deviatoric stress vanishes identically") {
    auto bt = std::make_shared<BarotropicFluid>(1.0, 2.0);
    YosidaRegularizedEnergy re(bt, 0.0, 0.0, RegularizationMode::Direct);
    auto r = evt::rng(61);
    for (int it = 0; it < 200; ++it) {
      const Tensor3 F = evt::random_deformation(r);
      const Tensor3 T = stress_T(re, F, Tensor3{}, det(F));
      CHECK(dev(T).norm() == 0.0);
      CHECK(stress_M(re, F, Tensor3{}, det(F)).norm() == 0.0);
    }
  }
  SUBCASE("stress maps match finite differences of the composed phi(F)") {
    auto check_stress = [&](std::shared_ptr<const PolyconvexEnergy> e, unsigned seed) {
      YosidaRegularizedEnergy re(e, 0.0, 0.0, RegularizationMode::Direct);
      auto r = evt::rng(seed);
      for (int it = 0; it < 60; ++it) {
        const Tensor3 F = evt::random_deformation(r);
        const double J = det(F);
        Tensor3 H;
        switch (e->calibration()) {
          case HCalibration::None: break;
          case HCalibration::CofF: H = cof(F); break;
          case HCalibration::PowerJTimesF: H = std::pow(J, e->alpha()) * F; break;
          case HCalibration::MooneyRivlinCof:
            H = std::pow(J, -7.0 / 6.0) * cof(F);
            break;
        }
        const StressPair sp = stress_pair(re, F, H, J);
        const Tensor3 dphi = composed_dphi_fd(*e, F);
        const double phi = composed_phi(*e, F);
        const Tensor3 T_ref = dphi * F.transposed() + phi * Tensor3::identity();
        const Tensor3 M_ref = dev(F.transposed() * dphi);
        CHECK((sp.T - T_ref).norm() <= 1e-6 * (1.0 + T_ref.norm()));
        CHECK((sp.M - M_ref).norm() <= 1e-6 * (1.0 + M_ref.norm()));
        CHECK(std::abs(sp.M.trace()) <= 1e-12 * (1.0 + sp.M.norm()));
      }
    };
    check_stress(std::make_shared<NeoHookean>(2.0, 1.0), 62);
    check_stress(std::make_shared<ReferentialNeoHookean>(2.0, 1.0), 63);
    check_stress(std::make_shared<MooneyRivlin>(2.0, 1.0, 0.5), 64);
    check_stress(std::make_shared<BarotropicFluid>(1.0, 2.0), 65);
  }
  SUBCASE("small-eps Yosida stress converges to the direct stress") {
    auto nh = std::make_shared<NeoHookean>(2.0, 1.0);
    YosidaRegularizedEnergy direct(nh, 0.0, 0.0, RegularizationMode::Direct);
    YosidaRegularizedEnergy prox(nh, 1e-8, 0.0, RegularizationMode::FullProx);
    auto r = evt::rng(66);
    for (int it = 0; it < 40; ++it) {
      const Tensor3 F = evt::random_deformation(r);
      const double J = det(F);
      const Tensor3 Td = stress_T(direct, F, Tensor3{}, J);
      const Tensor3 Tp = stress_T(prox, F, Tensor3{}, J);
      CHECK((Td - Tp).norm() <= 1e-6 * (1.0 + Td.norm()));
    }
  }
}

TEST_CASE("referential-frame conversion") {
  struct DetEnergy : ReferentialEnergy {
    double value(const Tensor3& F) const override { return det(F); }
    Tensor3 deriv(const Tensor3& F) const override { return cof(F); }
  };
  struct ConstEnergy : ReferentialEnergy {
    double value(const Tensor3&) const override { return 4.2; }
    Tensor3 deriv(const Tensor3&) const override { return Tensor3::zero(); }
  };
  auto r = evt::rng(71);
  SUBCASE("psi = det F gives T = I (Cramer identity)") {
    DetEnergy psi;
    for (int it = 0; it < 100; ++it) {
      const Tensor3 F = evt::random_deformation(r);
      CHECK((cauchy_from_referential(psi, F) - Tensor3::identity()).norm() <= 1e-12);
      CHECK(mandel_from_referential(psi, F).norm() <= 1e-12);
    }
  }
  SUBCASE("constant psi gives zero stress") {
    ConstEnergy psi;
    CHECK(cauchy_from_referential(psi, evt::random_deformation(r)).norm() == 0.0);
  }
  SUBCASE("nonpositive determinant is rejected") {
    DetEnergy psi;
    CHECK_THROWS_AS((void)cauchy_from_referential(psi, Tensor3::diag(1, 1, -1)),
                    DomainError);
  }
  SUBCASE("round trip: psi = phi * det recovers the actual-frame stress") {
    // psi'(F) by finite differences of phi(F) det(F) with phi neo-Hookean
    const NeoHookean nh(2.0, 1.0);
    struct Lifted : ReferentialEnergy {
      const NeoHookean& nh;
      explicit Lifted(const NeoHookean& n) : nh(n) {}
      double value(const Tensor3& F) const override {
        return composed_phi(nh, F) * det(F);
      }
      Tensor3 deriv(const Tensor3& F) const override {
        Tensor3 g;
        for (int q = 0; q < 9; ++q) {
          Tensor3 fp = F, fm = F;
          fp.e[q] += 1e-6;
          fm.e[q] -= 1e-6;
          g.e[q] = (value(fp) - value(fm)) / 2e-6;
        }
        return g;
      }
    } psi(nh);
    YosidaRegularizedEnergy direct(std::make_shared<NeoHookean>(2.0, 1.0), 0.0, 0.0,
                                   RegularizationMode::Direct);
    for (int it = 0; it < 100; ++it) {
      const Tensor3 F = evt::random_deformation(r);
      const Tensor3 Tref = cauchy_from_referential(psi, F);
      const Tensor3 Tact = stress_T(direct, F, Tensor3{}, det(F));
      CHECK((Tref - Tact).norm() <= 1e-5 * (1.0 + Tact.norm()));
    }
  }
}

TEST_CASE("kinetic-energy Hessian identities") {
  auto r = evt::rng(81);
  SUBCASE("determinant vanishes; Hessian is positive semidefinite") {
    for (int it = 0; it < 2000; ++it) {
      const double rho = std::pow(10.0, evt::uniform(r, -3.0, 3.0));
      const Vec3 v{evt::uniform(r), evt::uniform(r), evt::uniform(r)};
      const Vec3 p = rho * v;
      const double d = kinetic_hessian_det(p, rho);
      const double hn = 1.0 / rho + p.norm() / (rho * rho) +
                        p.norm2() / (rho * rho * rho);
      CHECK(std::abs(d) <= 1e-10 * hn * hn * hn * hn);
      CHECK(kinetic_hessian_psd(p, rho));
      CHECK(kinetic_hessian_min_eig(p, rho) >= -1e-12 * (1.0 / rho));
    }
  }
  SUBCASE("p = 0 gives diag(1/rho, 1/rho, 1/rho, 0)") {
    CHECK(kinetic_hessian_det(Vec3{}, 2.0) == 0.0);
    CHECK(kinetic_hessian_min_eig(Vec3{}, 2.0) == doctest::Approx(0.0));
  }
  SUBCASE("nonpositive density is rejected") {
    CHECK_THROWS_AS((void)kinetic_hessian_det(Vec3{1, 0, 0}, 0.0), DomainError);
  }
}

TEST_CASE("|F|^2/J^p Hessian determinant identity") {
  SUBCASE("pinned value at the identity, p = 2/3") {
    CHECK(fj_power_hessian_det(Tensor3::identity(), 1.0, 2.0 / 3.0) ==
          doctest::Approx(1024.0 / 3.0).epsilon(1e-13));
  }
  SUBCASE("p in {0,1} gives zero") {
    auto r = evt::rng(91);
    const Tensor3 F = evt::random_deformation(r);
    CHECK(fj_power_hessian_det(F, 1.3, 0.0) == 0.0);
    CHECK(fj_power_hessian_det(F, 1.3, 1.0) == 0.0);
  }
  SUBCASE("closed form matches the numeric 10x10 determinant") {
    auto r = evt::rng(92);
    for (int it = 0; it < 50; ++it) {
      const Tensor3 F = evt::random_deformation(r);
      const double J = evt::uniform(r, 0.6, 1.8);
      const double cf = fj_power_hessian_det(F, J, 0.5);
      const double nm = fj_power_hessian_det_numeric(F, J, 0.5);
      CHECK(evt::rel_err(nm, cf) <= 1e-6);
    }
  }
  SUBCASE("nonpositive J is rejected") {
    CHECK_THROWS_AS((void)fj_power_hessian_det(Tensor3::identity(), 0.0, 0.5),
                    DomainError);
  }
}

TEST_CASE("convexity probe") {
  SUBCASE("neo-Hookean passes on the solid box") {
    const NeoHookean nh(1.0, 1.0);
    const ConvexityReport rep = convexity_probe(nh, 2.0, 0.5, 2.0, 400);
    CHECK(rep.pass);
  }
  SUBCASE("|F|^2/J^{5/3} fails with a witness") {
    const FJPowerEnergy bad(5.0 / 3.0);
    const ConvexityReport rep = convexity_probe(bad, 2.0, 0.5, 2.0, 400);
    CHECK(!rep.pass);
    CHECK(rep.min_eig < 0.0);
    CHECK(rep.witness_J > 0.0);
  }
  SUBCASE("quadratic energy passes with a constant positive eigenvalue") {
    const QuadraticEnergy q;
    const ConvexityReport rep = convexity_probe(q, 2.0, 0.5, 2.0, 100);
    CHECK(rep.pass);
    CHECK(rep.min_eig == doctest::Approx(1.0).epsilon(1e-5));
  }
}
