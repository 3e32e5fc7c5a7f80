// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/snapshot.hpp"

#include <cstring>
#include <fstream>

namespace eulervisc {

namespace {

constexpr char kMagic[8] = {'E', 'V', 'S', 'N', 'A', 'P', '0', '1'};

int ncomp_of(FieldKind k) {
  switch (k) {
    case FieldKind::Scalar: return 1;
    case FieldKind::Vector: return 3;
    case FieldKind::Tensor: return 9;
    case FieldKind::SymTensor: return 6;
    case FieldKind::DevTensor: return 5;
  }
  return 0;
}

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

template <class V>
std::vector<double> flatten(const Field<V>& f) {
  constexpr int nc = FieldTraits<V>::ncomp;
  std::vector<double> out(f.size() * nc);
  for (long c = 0; c < f.size(); ++c) FieldTraits<V>::pack(f[c], out.data() + c * nc);
  for (double v : out)
    if (!std::isfinite(v)) throw DomainError("snapshot: non-finite field entry");
  return out;
}

}  // namespace

void SnapshotWriter::add(const std::string& name, const Field<double>& f) {
  entries_.push_back({name, FieldKind::Scalar, flatten(f)});
}
void SnapshotWriter::add(const std::string& name, const Field<Vec3>& f) {
  entries_.push_back({name, FieldKind::Vector, flatten(f)});
}
void SnapshotWriter::add(const std::string& name, const Field<Tensor3>& f) {
  entries_.push_back({name, FieldKind::Tensor, flatten(f)});
}
void SnapshotWriter::add(const std::string& name, const Field<SymTensor3>& f) {
  entries_.push_back({name, FieldKind::SymTensor, flatten(f)});
}
void SnapshotWriter::add(const std::string& name, const Field<DevTensor3>& f) {
  entries_.push_back({name, FieldKind::DevTensor, flatten(f)});
}

void SnapshotWriter::write(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("snapshot: cannot open " + path + " for writing");
  os.write(kMagic, 8);
  put<std::int32_t>(os, grid_.dims);
  for (int d = 0; d < 3; ++d) put<std::int32_t>(os, grid_.n[d]);
  for (int d = 0; d < 3; ++d) put<double>(os, grid_.h[d]);
  put<std::uint8_t>(os, grid_.topology == Topology::Periodic ? 0 : 1);
  put<double>(os, time_);
  put<std::int32_t>(os, std::int32_t(entries_.size()));
  for (const Entry& e : entries_) {
    put<std::uint32_t>(os, std::uint32_t(e.name.size()));
    os.write(e.name.data(), std::streamsize(e.name.size()));
    put<std::uint8_t>(os, std::uint8_t(e.kind));
    os.write(reinterpret_cast<const char*>(e.data.data()),
             std::streamsize(e.data.size() * sizeof(double)));
  }
  if (!os) throw Error("snapshot: write failed for " + path);
}

void SnapshotWriter::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("snapshot: cannot open " + path + " for writing");
  os.precision(17);
  os << "x,y,z";
  for (const Entry& e : entries_)
    for (int q = 0; q < ncomp_of(e.kind); ++q) os << ',' << e.name << '_' << q;
  os << '\n';
  grid_.for_each([&](long idx, int i, int j, int k) {
    os << grid_.coord(0, i) << ',' << grid_.coord(1, j) << ',' << grid_.coord(2, k);
    for (const Entry& e : entries_) {
      const int nc = ncomp_of(e.kind);
      for (int q = 0; q < nc; ++q) os << ',' << e.data[idx * nc + q];
    }
    os << '\n';
  });
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("snapshot: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw Error("snapshot: bad magic in " + path);
  std::int32_t dims;
  get(is, dims);
  std::array<int, 3> n;
  for (int d = 0; d < 3; ++d) {
    std::int32_t v;
    get(is, v);
    n[d] = v;
  }
  std::array<double, 3> h;
  for (int d = 0; d < 3; ++d) get(is, h[d]);
  std::uint8_t topo;
  get(is, topo);
  Snapshot snap;
  snap.grid = Grid::make(dims, n, h, topo == 0 ? Topology::Periodic : Topology::Box);
  get(is, snap.time);
  std::int32_t nf;
  get(is, nf);
  for (int f = 0; f < nf; ++f) {
    std::uint32_t len;
    get(is, len);
    std::string name(len, '\0');
    is.read(name.data(), len);
    std::uint8_t kind;
    get(is, kind);
    Snapshot::Entry e;
    e.kind = FieldKind(kind);
    e.data.resize(std::size_t(snap.grid.ncells) * ncomp_of(e.kind));
    is.read(reinterpret_cast<char*>(e.data.data()),
            std::streamsize(e.data.size() * sizeof(double)));
    snap.fields.emplace(std::move(name), std::move(e));
  }
  if (!is) throw Error("snapshot: truncated file " + path);
  return snap;
}

}  // namespace eulervisc
