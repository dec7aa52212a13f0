#pragma once

#include "afc/anisotropy.hpp"

#include <cstdint>

namespace afc {

/// Dense matrix M over all nodes with u^T M v = B^s_A(u, v).
struct StiffnessOperator {
    Eigen::MatrixXd M;
    double s = 0.5;
    std::uint64_t kernel_hash = 0;
    bool closure = true;
};

/// B^s_A(u, v) = sum_{x,y} w(x) w(y) [A(x,y) grad^s u(x,y)] . grad^s v(x,y), plus the
/// far-field closure when the kernel carries exterior values and closure is set.
///
/// Assembly contracts A against zeta per pair, K(x,y) = zeta^T A zeta, and never forms
/// an operator on pair space.
StiffnessOperator assemble_bilinear(const Grid& g, const AnisotropyKernel& a, double s, bool closure = true);

/// C^s_A u = div^s (A . grad^s u) (+ closure), a density paired with test fields by quadrature.
Field apply_operator(const Grid& g, const AnisotropyKernel& a, double s, const Field& u, bool closure = true);

/// B^s_A(u, v) evaluated directly from pair fields.
double bilinear(const Grid& g, const AnisotropyKernel& a, double s, const Field& u, const Field& v, bool closure = true);

/// max over random (u, v) of |B_A(u,v) - B_{A_s}(u,v)| / (max|A| ||grad u|| ||grad v||).
double gauge_invariance_residual(const Grid& g, const AnisotropyKernel& a, double s, int trials, std::uint64_t seed);

/// max over random (u, v) of |<C u, v> - <u, C v>| / (max|A| ||grad u|| ||grad v||).
double self_adjointness_residual(const Grid& g, const AnisotropyKernel& a, double s, int trials, std::uint64_t seed);

/// Random smooth field: a sum of a few Gaussians decayed to zero at the box boundary.
Field random_smooth_field(const Grid& g, std::uint64_t seed, bool interior_only = false);

/// Random kernel with O(1) entries in every symmetry class (no far field).
AnisotropyKernel random_kernel(const Grid& g, std::uint64_t seed);

}  // namespace afc
