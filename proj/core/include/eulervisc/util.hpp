// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace eulervisc {

/// Deterministic pairwise reduction (fixed association order independent of
/// thread count) so energy diagnostics are bitwise reproducible.
inline double pairwise_sum(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  std::size_t n = v.size();
  while (n > 1) {
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < n / 2; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (n % 2 == 1) v[n / 2] = v[n - 1];
    n = half;
  }
  return v[0];
}

/// Cell-parallel width; EULERVISC_THREADS, default 1.
inline int thread_count() {
  static const int n = [] {
    const char* s = std::getenv("EULERVISC_THREADS");
    if (!s) return 1;
    const int v = std::atoi(s);
    return v > 0 ? v : 1;
  }();
  return n;
}

/// Chunked parallel loop over [0, n).  Writes must be disjoint per index;
/// there are no reductions here, so results are bitwise identical for any
/// thread count.
template <class F>
void parallel_for(long n, F&& fn) {
  const int nt = thread_count();
  if (nt <= 1 || n < 256) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nt);
  const long chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const long lo = t * chunk;
    const long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace eulervisc
