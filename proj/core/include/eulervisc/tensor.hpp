// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "eulervisc/error.hpp"

namespace eulervisc {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend Vec3 operator-(Vec3 a) { return a *= -1.0; }

  friend double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
  friend Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
  }
  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
};

/// Dense 3x3 tensor, row-major. The universal currency for F, E (as full),
/// T, M, Pi (as full), W, H and the identity.
struct Tensor3 {
  std::array<double, 9> e{};  // e[3*i + j]

  double& operator()(int i, int j) { return e[3 * i + j]; }
  double operator()(int i, int j) const { return e[3 * i + j]; }

  static Tensor3 zero() { return {}; }
  static Tensor3 identity() {
    Tensor3 t;
    t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
    return t;
  }
  static Tensor3 diag(double a, double b, double c) {
    Tensor3 t;
    t(0, 0) = a; t(1, 1) = b; t(2, 2) = c;
    return t;
  }
  /// Row-wise construction with a finiteness check (constructor contract:
  /// no NaN/Inf admitted).
  static Tensor3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    Tensor3 t;
    for (int j = 0; j < 3; ++j) {
      t(0, j) = r0[j];
      t(1, j) = r1[j];
      t(2, j) = r2[j];
    }
    t.require_finite();
    return t;
  }

  void require_finite() const {
    for (double v : e)
      if (!std::isfinite(v)) throw DomainError("Tensor3: non-finite entry");
  }

  Tensor3& operator+=(const Tensor3& o) {
    for (int i = 0; i < 9; ++i) e[i] += o.e[i];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    for (int i = 0; i < 9; ++i) e[i] -= o.e[i];
    return *this;
  }
  Tensor3& operator*=(double s) {
    for (int i = 0; i < 9; ++i) e[i] *= s;
    return *this;
  }
  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }
  friend Tensor3 operator*(Tensor3 a, double s) { return a *= s; }
  friend Tensor3 operator-(Tensor3 a) { return a *= -1.0; }

  friend Tensor3 operator*(const Tensor3& a, const Tensor3& b) {
    Tensor3 c;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
    return c;
  }
  friend Vec3 operator*(const Tensor3& a, const Vec3& v) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = a(i, 0) * v.x + a(i, 1) * v.y + a(i, 2) * v.z;
    return r;
  }

  Tensor3 transposed() const {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }
  double trace() const { return e[0] + e[4] + e[8]; }

  /// Frobenius inner product A:B.
  friend double ddot(const Tensor3& a, const Tensor3& b) {
    double s = 0.0;
    for (int i = 0; i < 9; ++i) s += a.e[i] * b.e[i];
    return s;
  }
  double norm2() const { return ddot(*this, *this); }
  double norm() const { return std::sqrt(norm2()); }
  double max_abs() const {
    double m = 0.0;
    for (double v : e) m = std::max(m, std::abs(v));
    return m;
  }

  friend Tensor3 outer(const Vec3& a, const Vec3& b) {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = a[i] * b[j];
    return t;
  }
};

/// Symmetric 3x3 tensor; symmetry is structural (6 stored entries:
/// xx, yy, zz, xy, yz, xz).
struct SymTensor3 {
  std::array<double, 6> e{};

  static constexpr int XX = 0, YY = 1, ZZ = 2, XY = 3, YZ = 4, XZ = 5;

  static SymTensor3 zero() { return {}; }
  static SymTensor3 identity() {
    SymTensor3 s;
    s.e[XX] = s.e[YY] = s.e[ZZ] = 1.0;
    return s;
  }
  static SymTensor3 diag(double a, double b, double c) {
    SymTensor3 s;
    s.e[XX] = a; s.e[YY] = b; s.e[ZZ] = c;
    return s;
  }

  double operator()(int i, int j) const {
    if (i == j) return e[i];
    const int k = i + j;  // 1 -> xy, 3 -> yz, 2 -> xz
    return k == 1 ? e[XY] : (k == 3 ? e[YZ] : e[XZ]);
  }
  double& at(int i, int j) {
    if (i == j) return e[i];
    const int k = i + j;
    return k == 1 ? e[XY] : (k == 3 ? e[YZ] : e[XZ]);
  }

  Tensor3 full() const {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(i, j);
    return t;
  }

  double trace() const { return e[XX] + e[YY] + e[ZZ]; }

  SymTensor3& operator+=(const SymTensor3& o) {
    for (int i = 0; i < 6; ++i) e[i] += o.e[i];
    return *this;
  }
  SymTensor3& operator-=(const SymTensor3& o) {
    for (int i = 0; i < 6; ++i) e[i] -= o.e[i];
    return *this;
  }
  SymTensor3& operator*=(double s) {
    for (int i = 0; i < 6; ++i) e[i] *= s;
    return *this;
  }
  friend SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) { return a += b; }
  friend SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) { return a -= b; }
  friend SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }
  friend SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }
  friend SymTensor3 operator-(SymTensor3 a) { return a *= -1.0; }

  /// Frobenius inner product, counting off-diagonal entries twice.
  friend double ddot(const SymTensor3& a, const SymTensor3& b) {
    return a.e[0] * b.e[0] + a.e[1] * b.e[1] + a.e[2] * b.e[2] +
           2.0 * (a.e[3] * b.e[3] + a.e[4] * b.e[4] + a.e[5] * b.e[5]);
  }
  double norm2() const { return ddot(*this, *this); }
  double norm() const { return std::sqrt(norm2()); }
};

/// Symmetric trace-free 3x3 tensor (5 stored entries; tr = 0 structurally).
/// Houses the inelastic distortion rate Pi.
struct DevTensor3 {
  // xx, yy, xy, yz, xz with zz = -(xx + yy)
  std::array<double, 5> e{};

  static constexpr int XX = 0, YY = 1, XY = 2, YZ = 3, XZ = 4;

  static DevTensor3 zero() { return {}; }

  double operator()(int i, int j) const {
    if (i == j) return i == 0 ? e[XX] : (i == 1 ? e[YY] : -(e[XX] + e[YY]));
    const int k = i + j;
    return k == 1 ? e[XY] : (k == 3 ? e[YZ] : e[XZ]);
  }

  SymTensor3 sym() const {
    SymTensor3 s;
    s.e[SymTensor3::XX] = e[XX];
    s.e[SymTensor3::YY] = e[YY];
    s.e[SymTensor3::ZZ] = -(e[XX] + e[YY]);
    s.e[SymTensor3::XY] = e[XY];
    s.e[SymTensor3::YZ] = e[YZ];
    s.e[SymTensor3::XZ] = e[XZ];
    return s;
  }
  Tensor3 full() const { return sym().full(); }

  DevTensor3& operator+=(const DevTensor3& o) {
    for (int i = 0; i < 5; ++i) e[i] += o.e[i];
    return *this;
  }
  DevTensor3& operator-=(const DevTensor3& o) {
    for (int i = 0; i < 5; ++i) e[i] -= o.e[i];
    return *this;
  }
  DevTensor3& operator*=(double s) {
    for (int i = 0; i < 5; ++i) e[i] *= s;
    return *this;
  }
  friend DevTensor3 operator+(DevTensor3 a, const DevTensor3& b) { return a += b; }
  friend DevTensor3 operator-(DevTensor3 a, const DevTensor3& b) { return a -= b; }
  friend DevTensor3 operator*(double s, DevTensor3 a) { return a *= s; }
  friend DevTensor3 operator*(DevTensor3 a, double s) { return a *= s; }
  friend DevTensor3 operator-(DevTensor3 a) { return a *= -1.0; }

  friend double ddot(const DevTensor3& a, const DevTensor3& b) {
    const double azz = -(a.e[XX] + a.e[YY]);
    const double bzz = -(b.e[XX] + b.e[YY]);
    return a.e[XX] * b.e[XX] + a.e[YY] * b.e[YY] + azz * bzz +
           2.0 * (a.e[XY] * b.e[XY] + a.e[YZ] * b.e[YZ] + a.e[XZ] * b.e[XZ]);
  }
  double norm2() const { return ddot(*this, *this); }
  double norm() const { return std::sqrt(norm2()); }
};

/// General (not necessarily symmetric) trace-free 3x3 tensor, 8 stored
/// entries: row-major (0,0)..(2,1), with (2,2) = -((0,0)+(1,1)).
struct TraceFreeTensor3 {
  std::array<double, 8> e{};

  static TraceFreeTensor3 zero() { return {}; }

  double operator()(int i, int j) const {
    const int k = 3 * i + j;
    return k < 8 ? e[k] : -(e[0] + e[4]);
  }
  Tensor3 full() const {
    Tensor3 t;
    for (int k = 0; k < 8; ++k) t.e[k] = e[k];
    t.e[8] = -(e[0] + e[4]);
    return t;
  }
  friend double ddot(const TraceFreeTensor3& a, const TraceFreeTensor3& b) {
    return ddot(a.full(), b.full());
  }
  double norm() const { return full().norm(); }
};

// ---------------------------------------------------------------------------
// Projections.  For all A: A = sym(A) + skw(A) = dev(A) + sph(A).

inline SymTensor3 sym(const Tensor3& a) {
  SymTensor3 s;
  s.e[SymTensor3::XX] = a(0, 0);
  s.e[SymTensor3::YY] = a(1, 1);
  s.e[SymTensor3::ZZ] = a(2, 2);
  s.e[SymTensor3::XY] = 0.5 * (a(0, 1) + a(1, 0));
  s.e[SymTensor3::YZ] = 0.5 * (a(1, 2) + a(2, 1));
  s.e[SymTensor3::XZ] = 0.5 * (a(0, 2) + a(2, 0));
  return s;
}

inline Tensor3 skw(const Tensor3& a) {
  Tensor3 w;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) w(i, j) = 0.5 * (a(i, j) - a(j, i));
  return w;
}

inline Tensor3 sph(const Tensor3& a) {
  const double m = a.trace() / 3.0;
  return Tensor3::diag(m, m, m);
}

inline Tensor3 dev(const Tensor3& a) {
  Tensor3 d = a;
  const double m = a.trace() / 3.0;
  d(0, 0) -= m;
  d(1, 1) -= m;
  d(2, 2) -= m;
  return d;
}

inline SymTensor3 sph(const SymTensor3& a) {
  const double m = a.trace() / 3.0;
  return SymTensor3::diag(m, m, m);
}

inline SymTensor3 dev_sym(const SymTensor3& a) {
  SymTensor3 d = a;
  const double m = a.trace() / 3.0;
  d.e[SymTensor3::XX] -= m;
  d.e[SymTensor3::YY] -= m;
  d.e[SymTensor3::ZZ] -= m;
  return d;
}

/// Projection onto the symmetric trace-free subspace (structural storage).
inline DevTensor3 dev_part(const SymTensor3& a) {
  const double m = a.trace() / 3.0;
  DevTensor3 d;
  d.e[DevTensor3::XX] = a.e[SymTensor3::XX] - m;
  d.e[DevTensor3::YY] = a.e[SymTensor3::YY] - m;
  d.e[DevTensor3::XY] = a.e[SymTensor3::XY];
  d.e[DevTensor3::YZ] = a.e[SymTensor3::YZ];
  d.e[DevTensor3::XZ] = a.e[SymTensor3::XZ];
  return d;
}

/// dev + sym projection of a general tensor; used to feed Mandel stress to the
/// inelastic flow rule.
inline DevTensor3 dev_part(const Tensor3& a) { return dev_part(sym(a)); }

inline TraceFreeTensor3 dev_general(const Tensor3& a) {
  const Tensor3 d = dev(a);
  TraceFreeTensor3 t;
  for (int k = 0; k < 8; ++k) t.e[k] = d.e[k];
  return t;
}

// ---------------------------------------------------------------------------
// Determinant, cofactor, inverse.

inline double det(const Tensor3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/// Cofactor by 2x2 minors; defined for all A (Cof F = J F^{-T} when invertible).
inline Tensor3 cof(const Tensor3& a) {
  Tensor3 c;
  c(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  c(0, 1) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  c(0, 2) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  c(1, 0) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  c(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  c(1, 2) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  c(2, 0) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  c(2, 1) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  c(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return c;
}

/// Inverse via the Cramer rule.  Throws SingularMatrixError when |det| falls
/// below 1e-14 * scale^3 with scale the max-norm of A.
Tensor3 inv(const Tensor3& a);

/// Directional derivative of Cof at F in direction G (the linear mapping
/// Cof' = det'' of the paper's polyconvex calculus).  Cof is a quadratic
/// polynomial on 3x3 matrices, so its polarization is exact:
///   Cof'(F)[G] = Cof(F+G) - Cof(F) - Cof(G).
Tensor3 cof_prime(const Tensor3& f, const Tensor3& g);

/// Adjoint pairing helper: cof_prime(F,.) is self-adjoint (it is the Hessian
/// of det), i.e. ddot(cof_prime(F,G1),G2) == ddot(G1,cof_prime(F,G2)).

// ---------------------------------------------------------------------------
// Zaremba-Jaumann bilinear operator.

/// B_zj(v,E) = (v.grad)E - skw(grad v) E + E skw(grad v).
/// The transport term is supplied precomputed (it is a grid operation).
/// Output is symmetric whenever E is; WE - EW with W skew is symmetrized
/// structurally on return.
SymTensor3 b_zj(const Tensor3& grad_v, const SymTensor3& v_dot_gradE,
                const SymTensor3& E);

}  // namespace eulervisc
