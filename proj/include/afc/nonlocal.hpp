#pragma once

#include "afc/fields.hpp"

#include <array>
#include <optional>

namespace afc {

/// C_{n,s} = 4^s Gamma(n/2 + s) / (pi^{n/2} |Gamma(-s)|), s in (0, 1).
double cns_constant(int n, double s);

/// zeta(x, y) = (C_{n,s}^{1/2} / sqrt 2) (x - y) / |x - y|^{n/2 + s + 1}.
class ZetaKernel {
public:
    ZetaKernel(int n, double s);

    int dim() const { return n_; }
    double s() const { return s_; }
    double constant() const { return c_; }
    /// Writes dim components of zeta(x, y) into out; zero when x == y.
    void eval(const double* x, const double* y, double* out) const;

private:
    int n_;
    double s_;
    double c_;
    double pref_;
    double expo_;
};

/// (grad^s u)(x, y) = (u(y) - u(x)) zeta(x, y); diagonal pairs are zero.
PairField frac_gradient(const Grid& g, const Field& u, double s);

/// Exact weighted transpose of frac_gradient:
/// <V, grad^s phi>_pair = <div^s V, phi>_node for every nodal phi.
Field frac_divergence(const Grid& g, const PairField& v, double s);

/// Product-rule pair quadrature sum_{x,y} w(x) w(y) V(x,y) . W(x,y).
double pair_inner(const Grid& g, const PairField& a, const PairField& b);

/// T(x) = int_{y outside the box} zeta(x, y) (x) zeta(x, y) dy.
///
/// Fields vanish outside the computational box, so pairs with one point outside
/// contribute u(x) v(x) times this tensor. Including it makes the pair quadrature
/// a discretisation of the whole-space form rather than of the box-truncated one.
MatrixField far_field_tensor(const Grid& g, double s);

/// div^s grad^s u, optionally with the far-field closure 2 tr T(x) u(x).
Field frac_laplacian_pair(const Grid& g, const Field& u, double s, bool closure = true);

/// ||grad^s u||^2 in the pair norm, optionally with the far-field closure.
double pair_norm_sq(const Grid& g, const Field& u, double s, bool closure = true);

struct KernelSplitResult {
    bool applicable = true;  ///< false when n + 2s = 2
    double residual = 0.0;   ///< max-norm residual of the splitting
};

/// Residual of (x-y)(x-y)^T / r^{n+2s+2} = alpha Id r^{-(n+2s)} - beta grad_y grad_x r^{-(n+2s-2)}
/// with the Hessian term from central differences of step eta.
KernelSplitResult kernel_split_residual(int n, const std::array<double, 2>& x, const std::array<double, 2>& y, double s,
                                        double eta = 1e-4);

}  // namespace afc
