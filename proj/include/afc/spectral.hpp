#pragma once

#include "afc/grid.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace afc {

/// Frequency sample handed to multiplier callbacks.
struct Frequency {
    std::array<double, 2> xi{0.0, 0.0};  ///< angular frequency, integer lattice times pi / (pad L)
    std::array<bool, 2> nyquist{false, false};
    bool zero = false;
};

using Multiplier = std::function<std::complex<double>(const Frequency&)>;

/// Apply a Fourier multiplier to u.
///
/// With pad > 1 the field is embedded in a box pad times wider (extended by
/// its value at node 0), transformed there and restricted back. This damps
/// interactions with periodic images for fields that are compactly supported
/// or constant near the box boundary. pad = 1 is the plain periodic operator.
Field apply_multiplier(const Grid& g, const Field& u, const Multiplier& m, int pad = 1);

/// (-Delta)^t via the symbol |xi|^{2t}; the xi = 0 coefficient is always annihilated.
Field frac_laplacian_spectral(const Grid& g, const Field& u, double t, int pad = 1);

/// Riesz potential (-Delta)^{s-1}.
inline Field riesz_potential(const Grid& g, const Field& u, double s, int pad = 1) {
    return frac_laplacian_spectral(g, u, s - 1.0, pad);
}

/// ||(1 + |xi|^2)^{r/2} u_hat||, normalised so that r = 0 gives the quadrature L2 norm.
double sobolev_norm(const Grid& g, const Field& u, double r);

struct PoincareReport {
    double lhs = 0.0;    ///< ||(-Delta)^{t/2} u||
    double rhs = 0.0;    ///< ||(-Delta)^{s/2} u||
    double ratio = 0.0;  ///< lhs / rhs, 0 when u = 0
};

PoincareReport poincare_check(const Grid& g, const Field& u, double t, double s);

/// Spectral d/dx_axis (Nyquist mode dropped).
Field derivative(const Grid& g, const Field& u, int axis, int pad = 1);
/// Spectral d^2/(dx_i dx_j); the pure second derivative keeps the Nyquist mode so that
/// summing i = j terms reproduces the Laplacian symbol -|xi|^2 exactly.
Field second_derivative(const Grid& g, const Field& u, int i, int j, int pad = 1);
Field laplacian(const Grid& g, const Field& u, int pad = 1);

/// Real-space weights of a real, even multiplier: (m u)(x_a) = sum_b kernel(x_a - x_b) u(x_b)
/// for fields supported in the box (pad >= 2) or periodic fields (pad = 1).
class ConvolutionKernel {
public:
    ConvolutionKernel(const Grid& g, const Multiplier& m, int pad);
    double between(std::size_t a, std::size_t b) const;

private:
    int dim_ = 1;
    int n_ = 0;
    int np_ = 0;
    std::vector<double> values_;
};

}  // namespace afc
