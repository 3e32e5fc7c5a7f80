// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <map>
#include <string>
#include <vector>

#include "eulervisc/field.hpp"

namespace eulervisc {

// Self-describing snapshot container: "EVSNAP01" magic, grid header, then one
// row-major little-endian f64 payload per field (component-contiguous per
// cell).  CSV export is provided for small grids.

enum class FieldKind : std::uint8_t {
  Scalar = 0,
  Vector = 1,
  Tensor = 2,
  SymTensor = 3,
  DevTensor = 4
};

class SnapshotWriter {
 public:
  SnapshotWriter(const Grid& g, double time) : grid_(g), time_(time) {}

  void add(const std::string& name, const Field<double>& f);
  void add(const std::string& name, const Field<Vec3>& f);
  void add(const std::string& name, const Field<Tensor3>& f);
  void add(const std::string& name, const Field<SymTensor3>& f);
  void add(const std::string& name, const Field<DevTensor3>& f);

  void write(const std::string& path) const;
  void write_csv(const std::string& path) const;

 private:
  struct Entry {
    std::string name;
    FieldKind kind;
    std::vector<double> data;  // ncells * ncomp
  };
  const Grid& grid_;
  double time_;
  std::vector<Entry> entries_;
};

struct Snapshot {
  Grid grid;
  double time = 0.0;
  struct Entry {
    FieldKind kind;
    std::vector<double> data;
  };
  std::map<std::string, Entry> fields;
};

Snapshot read_snapshot(const std::string& path);

}  // namespace eulervisc
