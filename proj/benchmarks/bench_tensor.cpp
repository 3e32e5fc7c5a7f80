// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include <benchmark/benchmark.h>

#include <random>

#include "eulervisc/tensor.hpp"

using namespace eulervisc;

namespace {

Tensor3 sample(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor3 t = Tensor3::identity();
  for (double& e : t.e) e += 0.3 * u(rng);
  return t;
}

void BM_Cof(benchmark::State& state) {
  const Tensor3 f = sample(1);
  for (auto _ : state) benchmark::DoNotOptimize(cof(f));
}
BENCHMARK(BM_Cof);

void BM_Inv(benchmark::State& state) {
  const Tensor3 f = sample(2);
  for (auto _ : state) benchmark::DoNotOptimize(inv(f));
}
BENCHMARK(BM_Inv);

void BM_CofPrime(benchmark::State& state) {
  const Tensor3 f = sample(3), g = sample(4);
  for (auto _ : state) benchmark::DoNotOptimize(cof_prime(f, g));
}
BENCHMARK(BM_CofPrime);

void BM_Bzj(benchmark::State& state) {
  const Tensor3 gv = sample(5);
  const SymTensor3 e = sym(sample(6));
  for (auto _ : state) benchmark::DoNotOptimize(b_zj(gv, SymTensor3::zero(), e));
}
BENCHMARK(BM_Bzj);

}  // namespace

BENCHMARK_MAIN();
