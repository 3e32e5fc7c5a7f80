// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#include "eulervisc/tensor.hpp"

namespace eulervisc {

Tensor3 inv(const Tensor3& a) {
  const double d = det(a);
  const double scale = a.max_abs();
  if (std::abs(d) <= 1e-14 * scale * scale * scale)
    throw SingularMatrixError("inv: 3x3 matrix singular to pivot tolerance");
  return cof(a).transposed() * (1.0 / d);
}

Tensor3 cof_prime(const Tensor3& f, const Tensor3& g) {
  return cof(f + g) - cof(f) - cof(g);
}

SymTensor3 b_zj(const Tensor3& grad_v, const SymTensor3& v_dot_gradE,
                const SymTensor3& E) {
  const Tensor3 w = skw(grad_v);
  const Tensor3 ef = E.full();
  // EW - WE is symmetric for skew W and symmetric E; sym() removes the
  // round-off skew part.
  return v_dot_gradE + sym(ef * w - w * ef);
}

}  // namespace eulervisc
