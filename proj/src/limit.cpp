#include "afc/limit.hpp"

#include "afc/conductivity.hpp"
#include "afc/error.hpp"
#include "afc/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace afc {

MatrixField limit_matrix(const AnisotropyKernel& as) {
    const int d = as.dim;
    MatrixField out(as.nodes, d);
    for (std::size_t x = 0; x < as.nodes; ++x) {
        const double* m = as.at(x, x);
        double tr = 0.0;
        for (int i = 0; i < d; ++i) tr += m[i * d + i];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) out.at(x, i, j) = ((i == j ? tr : 0.0) + 2.0 * m[i * d + j]) / (d + 2.0);
    }
    return out;
}

LimitPositivity check_limit_matrix(const MatrixField& ap, double nu) {
    LimitPositivity r;
    r.min_eigenvalue = 1e300;
    const int d = ap.dim;
    for (std::size_t x = 0; x < ap.nodes(); ++x) {
        Eigen::MatrixXd m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = ap.at(x, i, j);
        r.max_asymmetry = std::max(r.max_asymmetry, (m - m.transpose()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
        r.min_eigenvalue = std::min(r.min_eigenvalue, es.eigenvalues().minCoeff());
    }
    r.pass = r.max_asymmetry == 0.0 && r.min_eigenvalue >= nu - 1e-12 * std::max(1.0, std::abs(nu));
    return r;
}

namespace {

std::vector<Field> gradient(const Grid& g, const Field& u, int pad) {
    std::vector<Field> out;
    for (int a = 0; a < g.dim(); ++a) out.push_back(derivative(g, u, a, pad));
    return out;
}

}  // namespace

Field classical_operator(const Grid& g, const MatrixField& ap, const Field& u, int pad) {
    const auto du = gradient(g, u, pad);
    Field out = Field::Zero(u.size());
    for (int i = 0; i < g.dim(); ++i) {
        Field flux = Field::Zero(u.size());
        for (int j = 0; j < g.dim(); ++j) flux += ap.entry(i, j).cwiseProduct(du[static_cast<std::size_t>(j)]);
        out -= derivative(g, flux, i, pad);
    }
    return out;
}

double classical_weak(const Grid& g, const MatrixField& ap, const Field& u, const Field& v, int pad) {
    const auto du = gradient(g, u, pad);
    const auto dv = gradient(g, v, pad);
    double acc = 0.0;
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            acc += ap.entry(i, j).cwiseProduct(du[static_cast<std::size_t>(j)]).dot(dv[static_cast<std::size_t>(i)]);
    return g.weight() * acc;
}

std::vector<Field> limit_test_basis(const Grid& g, int count, std::uint64_t seed) {
    std::vector<Field> out;
    for (int j = 0; j < count; ++j) out.push_back(random_smooth_field(g, seed + static_cast<std::uint64_t>(j), true));
    return out;
}

namespace {

double rel_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double n = b.norm();
    return n > 0.0 ? (a - b).norm() / n : (a - b).norm();
}

Eigen::VectorXd reduction_pairings(const Grid& g, const PhiSequence& phi, double s, const Field& u, const std::vector<Field>& tests,
                                   int pad) {
    const TransformedPotential q = build_Q(g, phi, s, pad);
    const Sequence w = reduce(u, phi);
    Eigen::VectorXd out(static_cast<Eigen::Index>(tests.size()));
    for (std::size_t j = 0; j < tests.size(); ++j)
        out[static_cast<Eigen::Index>(j)] = transformed_bilinear(g, q, w, reduce(tests[j], phi));
    return out;
}

}  // namespace

SweepResult s_sweep(const Grid& g, const PhiSequence& phi, const Field& u, const std::vector<double>& s_list,
                    const std::vector<Field>& tests, int pad, bool pair_diagnostic) {
    if (tests.empty()) throw Error("s_sweep: empty test basis");
    for (std::size_t i = 0; i < s_list.size(); ++i) {
        if (!(s_list[i] > 0.0 && s_list[i] < 1.0)) throw Error("s_sweep: every s must lie in (0, 1)");
        if (i > 0 && !(s_list[i] > s_list[i - 1])) throw Error("s_sweep: s_list must be increasing");
    }
    const AnisotropyKernel a = kernel_from_phi(g, phi);
    const MatrixField ap = limit_matrix(a);
    const auto T = static_cast<Eigen::Index>(tests.size());

    Eigen::VectorXd weak(T), strong(T);
    const Field cu = classical_operator(g, ap, u, pad);
    for (Eigen::Index j = 0; j < T; ++j) {
        weak[j] = classical_weak(g, ap, u, tests[static_cast<std::size_t>(j)], pad);
        strong[j] = inner(g, cu, tests[static_cast<std::size_t>(j)]);
    }

    SweepResult res;
    res.floor_strong = rel_gap(strong, weak);
    res.floor_s1 = rel_gap(reduction_pairings(g, phi, 1.0, u, tests, pad), weak);
    res.floor = std::max(res.floor_strong, res.floor_s1);

    for (double s : s_list) {
        SweepRow row;
        row.s = s;
        row.e = rel_gap(reduction_pairings(g, phi, s, u, tests, pad), weak);
        if (pair_diagnostic) {
            const Eigen::MatrixXd M = assemble_bilinear(g, a, s).M;
            const Field Mu = M * u;
            Eigen::VectorXd b(T);
            for (Eigen::Index j = 0; j < T; ++j) b[j] = Mu.dot(tests[static_cast<std::size_t>(j)]);
            row.e_pair = rel_gap(b, weak);
        }
        res.rows.push_back(row);
    }

    res.monotone = true;
    for (std::size_t i = 1; i < res.rows.size(); ++i) {
        if (res.rows[i - 1].e <= 2.0 * res.floor) break;
        if (!(res.rows[i].e < res.rows[i - 1].e)) res.monotone = false;
    }
    return res;
}

}  // namespace afc
