// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include <benchmark/benchmark.h>

#include <random>

#include "eulervisc/materials.hpp"

using namespace eulervisc;

namespace {

Tensor3 sample(std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor3 t = Tensor3::identity();
  for (double& e : t.e) e += spread * u(rng);
  return t;
}

void BM_NeoHookeanEval(benchmark::State& state) {
  const NeoHookean nh(2.0, 1.0);
  std::mt19937_64 rng(7);
  double x[10], g[10];
  nh.pack(sample(rng, 0.3), Tensor3{}, 1.1, x);
  for (auto _ : state) benchmark::DoNotOptimize(nh.eval(x, g));
}
BENCHMARK(BM_NeoHookeanEval);

void BM_YosidaProxCold(benchmark::State& state) {
  auto nh = std::make_shared<NeoHookean>(2.0, 1.0);
  YosidaRegularizedEnergy re(nh, 1e-6, 0.0, RegularizationMode::FullProx);
  std::mt19937_64 rng(8);
  const Tensor3 F = sample(rng, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(re.eval(F, Tensor3{}, 1.1));
}
BENCHMARK(BM_YosidaProxCold);

void BM_YosidaProxWarm(benchmark::State& state) {
  auto nh = std::make_shared<NeoHookean>(2.0, 1.0);
  YosidaRegularizedEnergy re(nh, 1e-6, 0.0, RegularizationMode::FullProx);
  std::mt19937_64 rng(9);
  const Tensor3 F = sample(rng, 0.3);
  double warm[10];
  nh->pack(F, Tensor3{}, 1.1, warm);
  for (auto _ : state) benchmark::DoNotOptimize(re.eval(F, Tensor3{}, 1.1, warm));
}
BENCHMARK(BM_YosidaProxWarm);

void BM_StressPair(benchmark::State& state) {
  auto mr = std::make_shared<MooneyRivlin>(2.0, 1.0, 0.5);
  YosidaRegularizedEnergy re(mr, 0.0, 0.0, RegularizationMode::Direct);
  std::mt19937_64 rng(10);
  const Tensor3 F = sample(rng, 0.3);
  const double J = det(F);
  const Tensor3 H = std::pow(J, -7.0 / 6.0) * cof(F);
  for (auto _ : state) benchmark::DoNotOptimize(stress_pair(re, F, H, J));
}
BENCHMARK(BM_StressPair);

}  // namespace
