#pragma once

#include "afc/solver.hpp"

#include <string>
#include <vector>

namespace afc {

/// P_A f: solution with exterior values f and no interior source.
Field poisson_operator(const DirichletSolver& solver, const Field& f);

/// Columns are unit-peak hats (0.5, 1, 0.5 per axis) centred on a uniform sweep of the
/// window's nodes, as nodal fields over the whole grid.
Eigen::MatrixXd hat_basis(const Grid& g, int window, int count);

struct DNMatrix {
    Eigen::MatrixXd values;
    std::uint64_t kernel_hash = 0;
    double s = 0.0;
};

/// <Lambda f, g> = B(P f, g) on all exterior nodes: M_ee - M_eo M_oo^{-1} M_oe.
DNMatrix dn_full(const DirichletSolver& solver, std::uint64_t kernel_hash = 0, double s = 0.0);

/// max |D - D^T| / max |D|.
double dn_symmetry_residual(const DNMatrix& d);

/// Entry (i, j) = B(P src_j, tgt_i); src and tgt are nodal fields supported on the exterior.
DNMatrix dn_map(const DirichletSolver& solver, const Eigen::MatrixXd& src, const Eigen::MatrixXd& tgt,
                std::uint64_t kernel_hash = 0, double s = 0.0);

struct AlessandriniReport {
    double lhs = 0.0;           ///< <(Lambda_1 - Lambda_2) f1, f2>
    double rhs = 0.0;           ///< <w1 : (Q1 - Q2), w2>
    double energy_scale = 0.0;  ///< sqrt(B1(u1, u1) B2(u2, u2))
    double residual = 0.0;      ///< |lhs - rhs| / max(|lhs|, 1e-12 energy_scale)
};

/// Both sides of the integral identity for the gauge pair (phi1, phi2).
AlessandriniReport alessandrini_check(const Grid& g, const PhiSequence& phi1, const PhiSequence& phi2, double s, const Field& f1,
                                      const Field& f2, int pad = 8);

struct RungeReport {
    std::vector<double> curve;  ///< relative L2(omega) distance to span{P f_i - f_i, i < m}, m = 1..M
    bool a4 = false;
    std::string label;          ///< "supported" under (A4), otherwise "unsupported-by-theory"
};

RungeReport runge_residual(const DirichletSolver& solver, const PhiSequence& phi, const Field& target, const Eigen::MatrixXd& basis);

struct UniquenessReport {
    double delta_dn = 0.0;       ///< sigma_max of the W1 -> W2 block of Lambda_1 - Lambda_2
    double delta_kernel = 0.0;   ///< max |A_1s - A_2s| over interior pairs
    double control = 0.0;        ///< delta_dn of the rho = 0 control run
    double floor = 0.0;          ///< max(control, 1e-14 sigma_max(Lambda_1 block))
    double ratio = 0.0;          ///< delta_dn / floor
    bool control_pass = false;   ///< control <= 1e-10
    bool distinguish_pass = false;
};

UniquenessReport uniqueness_experiment(const Grid& g, const PhiSequence& phi1, const Field& rho, double s, int m1, int m2);

}  // namespace afc
