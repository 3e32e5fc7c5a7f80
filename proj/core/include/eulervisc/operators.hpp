// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <vector>

#include "eulervisc/field.hpp"

namespace eulervisc {

// Discrete differential operators on collocated structured grids.
//
// Two exact-transpose pairs are provided:
//   * centered pair:  grad_c / div_c   (spacing 2h), used for stress fluxes
//     and convective terms, with <div_c u, f>_h = -<u, grad_c f>_h to
//     round-off on periodic topology;
//   * face pair:      one-sided forward gradients with backward divergence
//     (div_m), used for the quasilinear diffusion terms, so that the compact
//     Laplacian is div_m(grad_p f) and all dissipation quadratures pair
//     exactly with their operators.
//
// On box topology every operator needs a boundary tag; impermeable walls odd-
// reflect the normal vector component, homogeneous Neumann reflects evenly.

void require_bc(const Grid& g, BCTag tag);

Field<Vec3> grad_c(const Field<double>& f, BCTag tag = BCTag::None);
Field<Tensor3> grad_c(const Field<Vec3>& v, BCTag tag = BCTag::None);  // (grad v)_ij = dv_i/dx_j
Field<double> div_c(const Field<Vec3>& u, BCTag tag = BCTag::None);
Field<Vec3> div_c(const Field<Tensor3>& t, BCTag tag = BCTag::None);   // (div T)_i = dT_ij/dx_j

/// Composition div_c(grad_c(f)); the public Laplacian satisfies the operator
/// identity by construction.
Field<double> laplacian(const Field<double>& f, BCTag tag = BCTag::None);

/// Compact 3-point-per-direction Laplacian div_m(grad_p(.)), applied
/// componentwise.  This is the stencil behind every delta-regularizing
/// Laplacian in the schemes and behind the audit's gradient quadratures.
template <class V>
Field<V> laplacian_compact(const Field<V>& f, BCTag tag = BCTag::None);

/// Third-order field: hessian of each velocity component.
struct Hess3 {
  Tensor3 c[3];  // c[i](j,l) = d2 v_i / dx_j dx_l

  double norm2() const { return c[0].norm2() + c[1].norm2() + c[2].norm2(); }
  Hess3& operator+=(const Hess3& o) {
    for (int i = 0; i < 3; ++i) c[i] += o.c[i];
    return *this;
  }
  Hess3& operator*=(double s) {
    for (int i = 0; i < 3; ++i) c[i] *= s;
    return *this;
  }
};

/// Discrete Hessian: compact second differences on the diagonal, centered
/// cross-derivatives off it.  Self-adjoint componentwise on periodic grids.
Field<Hess3> hessian(const Field<Vec3>& v, BCTag tag = BCTag::None);

/// Adjoint of `hessian` applied to a third-order field.
Field<Vec3> hessian_adjoint(const Field<Hess3>& s, BCTag tag = BCTag::None);

/// Variational double divergence of the hyperstress mu*|H v|^{p-2} H v.
/// <hyperstress_apply(v), v>_h == sum mu*|H v|^p h^d exactly (periodic).
/// Requires p_exp > 3, mu >= 0.
Field<Vec3> hyperstress_apply(const Field<Vec3>& v, double mu, double p_exp,
                              BCTag tag = BCTag::None);

/// The matching dissipation quadrature sum mu*|H v|^p h^d.
double hyperstress_dissipation(const Field<Vec3>& v, double mu, double p_exp,
                               BCTag tag = BCTag::None);

/// Cell-sum quadrature and the induced l2 pairing (pairwise summation order).
double integrate(const Field<double>& f);
double inner(const Field<double>& f, const Field<double>& g);

// ---------------------------------------------------------------------------
// Quasilinear face fluxes (forward-difference gradient stacks).

/// Per-cell forward-difference gradient stack of a scalar field:
/// out[dim][cell] = (f(x+e_dim) - f(x))/h_dim.
std::vector<Field<double>> grad_p(const Field<double>& f, BCTag tag = BCTag::None);

/// Backward divergence of face fluxes, exact negative transpose of grad_p.
Field<double> div_m(const std::vector<Field<double>>& w, BCTag tag = BCTag::None);

/// r-Laplacian flux of rho: w_l(x) = delta * |G rho(x)|^{r-2} (D+_l rho)(x)
/// with |G rho|^2 the full forward-gradient stack norm at the cell.
std::vector<Field<double>> p_laplacian_flux(const Field<double>& f, double coeff,
                                            double r_exp, BCTag tag = BCTag::None);

/// Compensating force  ~ |grad rho|^{r-2} (grad v) grad rho assembled so that
/// <f_comp, v>_h + <|v|^2/2, div_m w>_h == 0 to round-off (periodic); w must
/// be the same face flux that enters the mass equation.
Field<Vec3> compensating_force(const std::vector<Field<double>>& w,
                               const Field<Vec3>& v, BCTag tag = BCTag::None);

// ---------------------------------------------------------------------------
// Convection.

/// Skew-split convective momentum term ~ div(m (x) v):
///   C_i = 1/2 [ div_c(m v_i) + m . grad_c v_i + v_i div_c m ],
/// built so that <v, C(m,v)>_h == <|v|^2/2, div_c m>_h to round-off; this is
/// what turns the kinetic-energy convexity argument into a discrete theorem.
Field<Vec3> convective_momentum(const Field<Vec3>& m, const Field<Vec3>& v,
                                BCTag tag = BCTag::None);

/// Energy-compatible transport ~ (v.grad)U for a packed state U of nc
/// components per cell carrying a convex energy density phi with gradient
/// dphi.  Per face the two-point weight beta solves
///   beta*dphi(x).dU + (1-beta)*dphi(x+).dU = phi(x+) - phi(x),
/// which exists by convexity, so that
///   sum_cells [ dphi . T + phi * div_c v ] == 0
/// to round-off on periodic grids for arbitrary convex phi.  The weight is
/// 1/2 + O(h), keeping the stencil second-order consistent on smooth fields.
void energy_transport(const Grid& g, const Field<Vec3>& v,
                      const std::vector<double>& U, const std::vector<double>& phi,
                      const std::vector<double>& dphi, int nc,
                      std::vector<double>& out, BCTag tag = BCTag::None);

/// Plain centered transport (v.grad)U on packed components (reference /
/// diagnostics path).
void centered_transport(const Grid& g, const Field<Vec3>& v,
                        const std::vector<double>& U, int nc,
                        std::vector<double>& out, BCTag tag = BCTag::None);

}  // namespace eulervisc
