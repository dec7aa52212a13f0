#pragma once

#include "afc/fields.hpp"

#include <optional>
#include <string>
#include <vector>

namespace afc {

/// Matrix-valued two-point kernel A(x_i, y_j), diagonal pairs included.
///
/// far_out(x) and far_in(x) hold A(x, y) and A(y, x) for y outside the
/// computational box, where every kernel handled here is independent of y.
/// They feed the far-field closure of the bilinear form and may be absent.
struct AnisotropyKernel {
    std::uint64_t grid_hash = 0;
    std::size_t nodes = 0;
    int dim = 1;
    std::vector<double> data;  // (x, y, i, j) row-major
    std::optional<MatrixField> far_out;
    std::optional<MatrixField> far_in;
    double nu = 0.0;

    AnisotropyKernel() = default;
    explicit AnisotropyKernel(const Grid& g);

    double* at(std::size_t x, std::size_t y) { return data.data() + (x * nodes + y) * static_cast<std::size_t>(dim * dim); }
    const double* at(std::size_t x, std::size_t y) const { return data.data() + (x * nodes + y) * static_cast<std::size_t>(dim * dim); }
    double max_abs() const;
    std::uint64_t hash() const;
};

AnisotropyKernel operator-(const AnisotropyKernel& a, const AnisotropyKernel& b);
AnisotropyKernel scaled(const AnisotropyKernel& a, double c);

struct Symmetrization {
    AnisotropyKernel ms;  ///< (A + A^T) / 2
    AnisotropyKernel vs;  ///< (A(x,y) + A(y,x)) / 2
    AnisotropyKernel s;   ///< (A_vs)_ms
    AnisotropyKernel a;   ///< A - A_s
};

Symmetrization symmetrize(const AnisotropyKernel& a);

struct PositivityReport {
    double min_rayleigh = 0.0;
    bool pass = false;
};

/// Smallest eigenvalue of A_s(x, y) over all stored pairs, compared against nu.
PositivityReport check_positivity(const AnisotropyKernel& as, double nu);

enum class PhiKind { Beta, Phi };

struct PhiEntry {
    PhiKind kind = PhiKind::Beta;
    MatrixField field;
};

/// Finite sequence of matrix fields with A_s(x, y) = sum_k Phi_k(x) (.) Phi_k(y).
/// Beta-type entries are constant on the exterior, phi-type entries vanish there.
struct PhiSequence {
    int dim = 1;
    std::vector<PhiEntry> entries;

    std::size_t size() const { return entries.size(); }
    /// |Phi(x)|^2 = sum_k Phi_k(x) : Phi_k(x).
    Field norm_sq() const;
    /// Value of entry k outside omega (its exterior constant, zero for phi-type).
    Eigen::MatrixXd exterior_value(const Grid& g, std::size_t k) const;
    /// Throws unless every invariant of the sequence holds on g.
    void validate(const Grid& g) const;
    std::vector<MatrixField> betas() const;
    std::vector<MatrixField> phis() const;
};

/// Interleave as Phi_{2k} = beta_k, Phi_{2k+1} = phi_k, padding with zero fields.
PhiSequence interleave(const std::vector<MatrixField>& betas, const std::vector<MatrixField>& phis, std::size_t nodes, int dim);

/// a~(x, y) = sum_k beta_k(x) (.) beta_k(y).
AnisotropyKernel assemble_exterior(const Grid& g, const std::vector<MatrixField>& betas);

struct MercerOptions {
    double tol = 1e-10;
    bool strict = true;
};

struct MercerEntry {
    int i = 0;
    int j = 0;
    std::vector<double> eigenvalues;       ///< retained, descending, signed
    std::vector<Field> eigenfunctions;     ///< weighted-L2 normalised, zero outside omega
    int negatives = 0;                     ///< retained negative eigenvalues
    double trace_quadrature = 0.0;         ///< sum_x w psi(x, x)
    double trace_spectrum = 0.0;           ///< sum of all eigenvalues
    double reconstruction_residual = 0.0;  ///< relative Frobenius on omega x omega
    double lambda_max = 0.0;
};

struct MercerResult {
    std::vector<MatrixField> phis;
    std::vector<MercerEntry> entries;
    double max_residual = 0.0;
    int negatives = 0;
};

/// Entrywise Hilbert-Schmidt eigendecomposition of psi = A_s - a~ on omega x omega.
MercerResult mercer_decompose(const Grid& g, const AnisotropyKernel& as, const AnisotropyKernel& atilde,
                              const MercerOptions& opt = {});

/// Phi_k -> (1 + rho) Phi_k for rho supported in omega with 1 + rho > 0.
PhiSequence apply_gauge(const Grid& g, const PhiSequence& phi, const Field& rho);

/// A_s(x, y) = sum_k Phi_k(x) (.) Phi_k(y), with the far field taken from the exterior values.
AnisotropyKernel kernel_from_phi(const Grid& g, const PhiSequence& phi);

/// True when every beta-type entry is a multiple of the identity on the exterior.
bool exterior_isotropic(const Grid& g, const PhiSequence& phi);

}  // namespace afc
