// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <vector>

#include "eulervisc/grid.hpp"
#include "eulervisc/tensor.hpp"

namespace eulervisc {

/// One value per cell on a Grid.  The grid is referenced, not owned.
template <class V>
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g) : grid_(&g), data_(g.ncells) {}
  Field(const Grid& g, const V& fill) : grid_(&g), data_(g.ncells, fill) {}

  const Grid& grid() const { return *grid_; }
  long size() const { return long(data_.size()); }

  V& operator[](long i) { return data_[i]; }
  const V& operator[](long i) const { return data_[i]; }

  V* data() { return data_.data(); }
  const V* data() const { return data_.data(); }

  void fill(const V& v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  const Grid* grid_ = nullptr;
  std::vector<V> data_;
};

// Component packing used by the nonlinear solver and the energy-compatible
// transport.  Everything is flattened to doubles in a fixed order.
template <class V>
struct FieldTraits;

template <>
struct FieldTraits<double> {
  static constexpr int ncomp = 1;
  static void pack(const double& v, double* out) { out[0] = v; }
  static void unpack(const double* in, double& v) { v = in[0]; }
};

template <>
struct FieldTraits<Vec3> {
  static constexpr int ncomp = 3;
  static void pack(const Vec3& v, double* out) { out[0] = v.x; out[1] = v.y; out[2] = v.z; }
  static void unpack(const double* in, Vec3& v) { v = {in[0], in[1], in[2]}; }
};

template <>
struct FieldTraits<Tensor3> {
  static constexpr int ncomp = 9;
  static void pack(const Tensor3& v, double* out) { for (int i = 0; i < 9; ++i) out[i] = v.e[i]; }
  static void unpack(const double* in, Tensor3& v) { for (int i = 0; i < 9; ++i) v.e[i] = in[i]; }
};

template <>
struct FieldTraits<SymTensor3> {
  static constexpr int ncomp = 6;
  static void pack(const SymTensor3& v, double* out) { for (int i = 0; i < 6; ++i) out[i] = v.e[i]; }
  static void unpack(const double* in, SymTensor3& v) { for (int i = 0; i < 6; ++i) v.e[i] = in[i]; }
};

template <>
struct FieldTraits<DevTensor3> {
  static constexpr int ncomp = 5;
  static void pack(const DevTensor3& v, double* out) { for (int i = 0; i < 5; ++i) out[i] = v.e[i]; }
  static void unpack(const double* in, DevTensor3& v) { for (int i = 0; i < 5; ++i) v.e[i] = in[i]; }
};

/// Ghost-value parity on box topology, per value type.  Scalars and tensors
/// reflect evenly (homogeneous Neumann); vectors flip the normal component
/// (impermeable wall).
inline double ghost_value(const double& v, int, bool mirrored) {
  (void)mirrored;
  return v;
}
inline Vec3 ghost_value(const Vec3& v, int dim, bool mirrored) {
  if (!mirrored) return v;
  Vec3 g = v;
  g[dim] = -g[dim];
  return g;
}
inline Tensor3 ghost_value(const Tensor3& v, int, bool) { return v; }
inline SymTensor3 ghost_value(const SymTensor3& v, int, bool) { return v; }
inline DevTensor3 ghost_value(const DevTensor3& v, int, bool) { return v; }

/// Shifted access with topology handling.
template <class V>
inline V at_shift(const Field<V>& f, int i, int j, int k, int dim, int step) {
  bool mirrored = false;
  const long idx = f.grid().neighbor(i, j, k, dim, step, mirrored);
  return ghost_value(f[idx], dim, mirrored);
}

}  // namespace eulervisc
