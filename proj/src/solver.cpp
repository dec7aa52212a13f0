#include "afc/solver.hpp"

#include "afc/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace afc {

Eigen::MatrixXd block(const Eigen::MatrixXd& M, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
}

namespace {

Field gather(const Field& u, const std::vector<std::size_t>& idx) {
    Field out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = u[static_cast<Eigen::Index>(idx[i])];
    return out;
}

}  // namespace

DirichletSolver::DirichletSolver(const Grid& g, Eigen::MatrixXd M, const std::string& label)
    : g_(&g), M_(std::move(M)), in_(g.interior_nodes()), ex_(g.exterior_nodes()) {
    if (static_cast<std::size_t>(M_.rows()) != g.size() || M_.rows() != M_.cols()) throw Error("solver: matrix does not match the grid");
    llt_.compute(block(M_, in_, in_));
    if (llt_.info() != Eigen::Success) throw Error("solver: " + label + " is not positive definite");
}

Solution DirichletSolver::solve(const DirectProblem& p) const {
    const auto P = static_cast<Eigen::Index>(g_->size());
    const Field f = p.f.size() ? p.f : Field::Zero(P);
    const Field F = p.F.size() ? p.F : Field::Zero(P);
    if (f.size() != P || F.size() != P) throw Error("solver: data does not match the grid");
    if (!f.allFinite() || !F.allFinite()) throw Error("solver: data is not finite");

    const Field fe = gather(f, ex_);
    const Field Fi = gather(F, in_);
    const Field rhs = Fi - block(M_, in_, ex_) * fe;
    const Field ui = llt_.solve(rhs);

    Solution sol;
    sol.u = Field::Zero(P);
    for (std::size_t k = 0; k < ex_.size(); ++k) sol.u[static_cast<Eigen::Index>(ex_[k])] = fe[static_cast<Eigen::Index>(k)];
    for (std::size_t k = 0; k < in_.size(); ++k) sol.u[static_cast<Eigen::Index>(in_[k])] = ui[static_cast<Eigen::Index>(k)];

    const Field Mu = M_ * sol.u;
    sol.energy = sol.u.dot(Mu);
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < in_.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(in_[k]);
        worst = std::max(worst, std::abs(Mu[i] - F[i]));
        scale = std::max(scale, (M_.row(i).cwiseAbs() * sol.u.cwiseAbs())(0) + std::abs(F[i]));
    }
    sol.residual = scale > 0.0 ? worst / scale : worst;
    const double data = l2_norm(*g_, f) + std::sqrt(Fi.squaredNorm() / g_->weight());
    sol.stability = data > 0.0 ? l2_norm(*g_, sol.u) / data : 0.0;
    return sol;
}

Eigen::MatrixXd DirichletSolver::interior_response() const { return -llt_.solve(block(M_, in_, ex_)); }

Solution solve_direct(const Grid& g, const AnisotropyKernel& a, double s, const DirectProblem& p) {
    return DirichletSolver(g, assemble_bilinear(g, a, s).M).solve(p);
}

TransformedSolution solve_transformed(const Grid& g, const PhiSequence& phi, const TransformedPotential& q, const Sequence& gext,
                                      const Field& G, TransformedPath path, double proj_tol) {
    if (gext.size() != phi.size()) throw Error("solve_transformed: exterior datum has the wrong sequence length");
    const auto P = static_cast<Eigen::Index>(g.size());

    // Scalar pre-image of the exterior datum and its distance from the Phi-image.
    Field f = unreduce(gext, phi);
    for (auto a : g.interior_nodes()) f[static_cast<Eigen::Index>(a)] = 0.0;
    const Sequence back = reduce(f, phi);
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < gext.size(); ++k) {
        for (auto a : g.exterior_nodes()) {
            const auto ia = static_cast<Eigen::Index>(a);
            diff += (gext[k].values.row(ia) - back[k].values.row(ia)).squaredNorm();
            norm += gext[k].values.row(ia).squaredNorm();
        }
    }
    TransformedSolution out;
    out.projection = norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
    if (out.projection > proj_tol) throw Error("solve_transformed: exterior datum is not in the Phi-image");

    Eigen::MatrixXd M;
    if (path == TransformedPath::Spectral) {
        M = transformed_stiffness(g, q);
        M = 0.5 * (M + M.transpose()).eval();
    } else {
        M = assemble_bilinear(g, kernel_from_phi(g, phi), q.s).M;
    }
    const DirichletSolver solver(g, std::move(M), "transformed interior block");
    Solution sol = solver.solve({f, G.size() ? G : Field::Zero(P)});
    out.u = sol.u;
    out.w = reduce(sol.u, phi);
    out.residual = sol.residual;
    return out;
}

WellposednessReport wellposedness_report(const Grid& g, const Eigen::MatrixXd& M) {
    const Eigen::MatrixXd B = block(M, g.interior_nodes(), g.interior_nodes());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("wellposedness_report: eigensolver failed");
    WellposednessReport r;
    r.coercivity = es.eigenvalues().minCoeff();
    r.continuity = es.eigenvalues().maxCoeff();
    r.indefinite = r.coercivity <= 0.0;
    r.condition = r.indefinite ? std::numeric_limits<double>::infinity() : r.continuity / r.coercivity;
    return r;
}

}  // namespace afc
