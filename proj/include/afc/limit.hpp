#pragma once

#include "afc/reduction.hpp"

#include <vector>

namespace afc {

/// A'(x) = [Id tr A_s(x, x) + 2 A_s(x, x)] / (n + 2), read off the diagonal pairs.
MatrixField limit_matrix(const AnisotropyKernel& as);

struct LimitPositivity {
    double min_eigenvalue = 0.0;
    double max_asymmetry = 0.0;
    bool pass = false;  ///< symmetric and min_eigenvalue >= nu
};

LimitPositivity check_limit_matrix(const MatrixField& ap, double nu);

/// -div(A' grad u) with spectral derivatives.
Field classical_operator(const Grid& g, const MatrixField& ap, const Field& u, int pad = 1);

/// <A' grad u, grad v> by quadrature with spectral derivatives.
double classical_weak(const Grid& g, const MatrixField& ap, const Field& u, const Field& v, int pad = 1);

/// Fixed smooth test fields supported in omega.
std::vector<Field> limit_test_basis(const Grid& g, int count, std::uint64_t seed = 1000);

struct SweepRow {
    double s = 0.0;
    double e = 0.0;       ///< spectral reduction pairing B^s_Q(Phi u, Phi phi_j) vs <A' grad u, grad phi_j>
    double e_pair = 0.0;  ///< same with the pair-quadrature B^s_A, diagnostic only
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double floor = 0.0;         ///< max(strong vs weak classical pairing, reduction pairing at s = 1)
    double floor_strong = 0.0;
    double floor_s1 = 0.0;
    bool monotone = false;      ///< strictly decreasing until within 2x floor
};

SweepResult s_sweep(const Grid& g, const PhiSequence& phi, const Field& u, const std::vector<double>& s_list,
                    const std::vector<Field>& tests, int pad = 8, bool pair_diagnostic = true);

}  // namespace afc
