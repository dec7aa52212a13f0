#pragma once

#include "afc/conductivity.hpp"
#include "afc/reduction.hpp"

#include <Eigen/Cholesky>

#include <memory>
#include <string>

namespace afc {

/// Exterior-value problem C^s_A u = F in omega, u = f on the exterior.
///
/// f is read on exterior nodes only. F is a nodal dual vector, F(v) = sum_i F_i v_i,
/// read on interior nodes only.
struct DirectProblem {
    Field f;
    Field F;
};

struct Solution {
    Field u;
    double energy = 0.0;       ///< B(u, u)
    double residual = 0.0;     ///< max_i |B(u, e_i) - F_i| / scale over interior nodal basis fields
    double stability = 0.0;    ///< ||u|| / (||f|| + ||F||), 0 for zero data
};

/// Factorised interior block of a stiffness matrix, shared by every solve on it.
class DirichletSolver {
public:
    DirichletSolver(const Grid& g, Eigen::MatrixXd M, const std::string& label = "interior block");

    Solution solve(const DirectProblem& p) const;
    /// u_f with F = 0.
    Field poisson(const Field& f) const { return solve({f, Field()}).u; }

    const Eigen::MatrixXd& matrix() const { return M_; }
    const Grid& grid() const { return *g_; }
    /// -M_{omega omega}^{-1} M_{omega, e}: maps exterior values to interior values of P f.
    Eigen::MatrixXd interior_response() const;

private:
    const Grid* g_;
    Eigen::MatrixXd M_;
    std::vector<std::size_t> in_, ex_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

Solution solve_direct(const Grid& g, const AnisotropyKernel& a, double s, const DirectProblem& p);

enum class TransformedPath { Spectral, Pair };

struct TransformedSolution {
    Sequence w;              ///< Phi u
    Field u;                 ///< scalar pre-image, unreduce(w)
    double residual = 0.0;   ///< weak-form residual against Phi-image test fields
    double projection = 0.0; ///< relative distance of the exterior datum from the Phi-image
};

/// Solve (-Delta)^{s-1} D w + w : Q = G in omega, w = g on the exterior, on the Phi-image.
///
/// g must equal Phi f on exterior nodes for some scalar f. G is the dual vector
/// G_i = G(Phi e_i) on interior nodes. The spectral path uses the matrix of
/// B^s_Q(Phi u, Phi v); the pair path uses B^s_A(u, v), its pulled-back form.
TransformedSolution solve_transformed(const Grid& g, const PhiSequence& phi, const TransformedPotential& q, const Sequence& gext,
                                      const Field& G, TransformedPath path = TransformedPath::Spectral, double proj_tol = 1e-10);

struct WellposednessReport {
    double coercivity = 0.0;  ///< smallest eigenvalue of the interior block
    double continuity = 0.0;  ///< largest eigenvalue of the interior block
    double condition = 0.0;
    bool indefinite = false;
};

WellposednessReport wellposedness_report(const Grid& g, const Eigen::MatrixXd& M);

/// Rows and columns of M restricted to the given node lists.
Eigen::MatrixXd block(const Eigen::MatrixXd& M, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols);

}  // namespace afc
