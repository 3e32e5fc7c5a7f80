// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include <benchmark/benchmark.h>

#include <cmath>

#include "eulervisc/stepper_large.hpp"
#include "eulervisc/stepper_small.hpp"

using namespace eulervisc;

namespace {

Grid grid2d(int n) {
  return Grid::make(2, {n, n, 1}, {1.0 / n, 1.0 / n, 1.0}, Topology::Periodic);
}

SchemeParams params() {
  SchemeParams p;
  p.tau = 1e-3;
  p.eps = 1e-6;
  p.delta = 1e-4;
  p.mu = 1e-4;
  p.K_V = 0.5;
  p.G_V = 0.5;
  p.rho_max = 6.0;
  return p;
}

StateSmall init_small(const Grid& g) {
  StateSmall s(g);
  g.for_each([&](long c, int i, int j, int) {
    const double x = g.coord(0, i), y = g.coord(1, j);
    s.rho[c] = 1.0 + 0.1 * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
    s.p_mom[c] = s.rho[c] * Vec3{0.1 * std::cos(2 * M_PI * y), 0.0, 0.0};
  });
  return s;
}

void BM_StepSmall(benchmark::State& state) {
  const Grid g = grid2d(int(state.range(0)));
  const IsotropicQuadraticEnergy mat(1.0, 0.7);
  const SchemeParams p = params();
  StateSmall s = init_small(g);
  for (auto _ : state) {
    s = step_small(s, mat, p, nullptr);
    benchmark::DoNotOptimize(s.rho[0]);
  }
}
BENCHMARK(BM_StepSmall)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_StepLarge(benchmark::State& state) {
  const Grid g = grid2d(int(state.range(0)));
  auto nh = std::make_shared<NeoHookean>(1.0, 1.0);
  YosidaRegularizedEnergy re(nh, 1e-6, 1e-4, RegularizationMode::FullProx);
  const SchemeParams p = params();
  Field<double> rho(g, 1.0);
  Field<Vec3> v(g);
  Field<Tensor3> F(g, Tensor3::identity());
  g.for_each([&](long c, int i, int, int) {
    F[c](0, 1) = 0.05 * std::sin(2 * M_PI * g.coord(0, i));
  });
  StateLarge s = make_initial_large(rho, v, F, HCalibration::None);
  for (auto _ : state) {
    s = step_large(s, re, p, nullptr);
    benchmark::DoNotOptimize(s.rho[0]);
  }
}
BENCHMARK(BM_StepLarge)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
