#pragma once

#include "afc/anisotropy.hpp"
#include "afc/spectral.hpp"

#include <vector>

namespace afc {

/// A sequence-of-matrices field such as w = Phi u.
using Sequence = std::vector<MatrixField>;

/// (D M)_ij = -(delta_ij Lap M_ij + 2 s d_i d_j M_ij) / (n + 2s), spectral derivatives.
MatrixField apply_D(const Grid& g, const MatrixField& m, double s, int pad = 1);

/// Symbol of (-Delta)^{s-1} D for entry (i, j).
Multiplier riesz_D_symbol(int dim, double s, int i, int j);

/// (-Delta)^{s-1} D applied to each member of a sequence.
Sequence riesz_D(const Grid& g, const Sequence& w, double s, int pad = 1);

/// Pointwise full contraction a : b summed over the sequence index.
Field tridot(const Sequence& a, const Sequence& b);

Sequence reduce(const Field& u, const PhiSequence& phi);
/// u = (Phi : w) / |Phi|^2.
Field unreduce(const Sequence& w, const PhiSequence& phi);
Sequence as_sequence(const PhiSequence& phi);

/// Q = -Phi (x) R / |Phi|^2 with R_k = (-Delta)^{s-1} D Phi_k, kept in factored form.
struct TransformedPotential {
    Sequence phi;
    Sequence R;
    Field norm_sq;
    double s = 0.5;
    int pad = 1;

    /// (w : Q)_l = -(w : Phi) R_l / |Phi|^2.
    Sequence apply(const Sequence& w) const;
    /// Phi : R per node.
    Field phi_dot_R() const { return tridot(phi, R); }
};

TransformedPotential build_Q(const Grid& g, const PhiSequence& phi, double s, int pad = 1);

/// B^s_Q(w, v) = <(-Delta)^{s-1} D w, v> + <w : Q, v>, summed over the sequence index.
double transformed_bilinear(const Grid& g, const TransformedPotential& q, const Sequence& w, const Sequence& v);

/// Matrix of u, v -> B^s_Q(Phi u, Phi v) over all nodes (spectral path).
Eigen::MatrixXd transformed_stiffness(const Grid& g, const TransformedPotential& q);

struct ReductionResidual {
    double b_a = 0.0;       ///< pair-quadrature B^s_A(u, v)
    double b_q = 0.0;       ///< spectral B^s_Q(Phi u, Phi v)
    double scale = 0.0;     ///< sqrt(|B_A(u,u)| |B_A(v,v)|)
    double residual = 0.0;  ///< |b_a - b_q| / scale
};

ReductionResidual reduction_identity_residual(const Grid& g, const PhiSequence& phi, double s, const Field& u, const Field& v,
                                              int pad = 1);

/// G_k = [(-Delta)^{s-1} D(rho Phi1_k) - rho (-Delta)^{s-1} D Phi1_k] / ((1 + rho) |Phi1|^2),
/// so that Q1 - Q2 = Phi1 (x) G for Phi2 = (1 + rho) Phi1.
Sequence gauge_closed_form(const Grid& g, const PhiSequence& phi1, const Field& rho, double s, int pad = 1);

/// max over nodes and tensor slots of |(Q1 - Q2) - Phi1 (x) G| / max|Q1 - Q2|.
double gauge_closed_form_residual(const Grid& g, const PhiSequence& phi1, const Field& rho, double s, int pad = 1);

}  // namespace afc
