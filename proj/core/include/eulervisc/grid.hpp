// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <array>
#include <cstdint>

#include "eulervisc/error.hpp"

namespace eulervisc {

enum class Topology : std::uint8_t { Periodic, Box };

/// Boundary-condition tag for discrete operators on box topology.
/// Impermeable: zero normal component (odd reflection of the normal part).
/// Neumann: zero normal derivative (even reflection).
enum class BCTag : std::uint8_t { None, Impermeable, Neumann };

/// Structured collocated grid, 1-3 resolved dimensions.  Tensors stay 3x3
/// regardless of dims (plane-strain embedding); derivatives act only on
/// resolved directions.
struct Grid {
  int dims = 2;
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> h{1.0, 1.0, 1.0};
  Topology topology = Topology::Periodic;

  std::array<int, 3> stride{1, 1, 1};
  long ncells = 1;
  double cell_volume = 1.0;

  static Grid make(int dims, std::array<int, 3> n, std::array<double, 3> h,
                   Topology topo) {
    Grid g;
    g.dims = dims;
    if (dims < 1 || dims > 3) throw DomainError("Grid: dims must be 1..3");
    for (int d = 0; d < 3; ++d) {
      g.n[d] = d < dims ? n[d] : 1;
      g.h[d] = d < dims ? h[d] : 1.0;
      if (d < dims && g.n[d] < 4)
        throw DomainError("Grid: need n >= 4 per resolved dimension");
      if (d < dims && !(g.h[d] > 0.0)) throw DomainError("Grid: h must be > 0");
    }
    g.topology = topo;
    g.stride = {1, g.n[0], g.n[0] * g.n[1]};
    g.ncells = long(g.n[0]) * g.n[1] * g.n[2];
    g.cell_volume = 1.0;
    for (int d = 0; d < dims; ++d) g.cell_volume *= g.h[d];
    return g;
  }

  bool same_layout(const Grid& o) const {
    return dims == o.dims && n == o.n && h == o.h && topology == o.topology;
  }

  long index(int i, int j, int k) const {
    return i + stride[1] * long(j) + stride[2] * long(k);
  }

  /// Cell center coordinates (cell i spans [i*h, (i+1)*h)).
  double coord(int dim, int i) const { return (i + 0.5) * h[dim]; }

  double extent(int dim) const { return n[dim] * h[dim]; }

  double domain_volume() const { return cell_volume * double(ncells); }

  /// Neighbor cell along `dim` at offset `step` (+1/-1/+2/-2...).  On box
  /// topology a crossing is reflected about the boundary face and `mirrored`
  /// is set; the caller decides the parity of the ghost value.
  long neighbor(int i, int j, int k, int dim, int step, bool& mirrored) const {
    int c[3] = {i, j, k};
    c[dim] += step;
    mirrored = false;
    if (topology == Topology::Periodic) {
      c[dim] = wrap(c[dim], n[dim]);
    } else {
      if (c[dim] < 0) {
        c[dim] = -c[dim] - 1;  // reflect about the face x=0
        mirrored = true;
      } else if (c[dim] >= n[dim]) {
        c[dim] = 2 * n[dim] - c[dim] - 1;
        mirrored = true;
      }
    }
    return index(c[0], c[1], c[2]);
  }

  template <class F>
  void for_each(F&& fn) const {
    for (int k = 0; k < n[2]; ++k)
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i) fn(index(i, j, k), i, j, k);
  }

 private:
  static int wrap(int i, int m) {
    if (i >= m) return i - m;
    if (i < 0) return i + m;
    return i;
  }
};

}  // namespace eulervisc
