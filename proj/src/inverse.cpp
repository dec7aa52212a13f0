#include "afc/inverse.hpp"

#include "afc/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace afc {

Field poisson_operator(const DirichletSolver& solver, const Field& f) { return solver.poisson(f); }

Eigen::MatrixXd hat_basis(const Grid& g, int window, int count) {
    if (count < 1) throw Error("hat_basis: count must be positive");
    const auto& nodes = g.window_nodes(window);
    std::array<int, 2> lo{1 << 30, 1 << 30}, hi{-1, -1};
    for (auto a : nodes) {
        const auto idx = g.index(a);
        for (int d = 0; d < g.dim(); ++d) {
            const auto ud = static_cast<std::size_t>(d);
            lo[ud] = std::min(lo[ud], idx[ud]);
            hi[ud] = std::max(hi[ud], idx[ud]);
        }
    }
    for (int d = 0; d < g.dim(); ++d)
        if (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)] < 2) throw Error("hat_basis: window is narrower than one hat");

    // Centres on a per-axis sweep; in 2D a near-square tensor layout truncated to count.
    std::array<int, 2> per{count, 1};
    if (g.dim() == 2) {
        per[0] = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
        per[1] = (count + per[0] - 1) / per[0];
    }
    auto sweep = [&](int axis, int m, int k) {
        const auto ua = static_cast<std::size_t>(axis);
        const int first = lo[ua] + 1, last = hi[ua] - 1;
        if (m == 1) return (first + last) / 2;
        return first + static_cast<int>(std::lround(static_cast<double>(k) * (last - first) / (m - 1)));
    };

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.size()), count);
    for (int c = 0; c < count; ++c) {
        std::array<int, 2> centre{0, 0};
        centre[0] = sweep(0, per[0], c % per[0]);
        if (g.dim() == 2) centre[1] = sweep(1, per[1], c / per[0]);
        const int oy = g.dim() == 2 ? 1 : 0;
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -oy; dy <= oy; ++dy) {
                std::array<int, 2> idx{centre[0] + dx, centre[1] + dy};
                const double v = (1.0 - 0.5 * std::abs(dx)) * (1.0 - 0.5 * std::abs(dy));
                out(static_cast<Eigen::Index>(g.node(idx)), c) = v;
            }
        }
    }
    return out;
}

DNMatrix dn_full(const DirichletSolver& solver, std::uint64_t kernel_hash, double s) {
    const Grid& g = solver.grid();
    const auto& ex = g.exterior_nodes();
    const auto& in = g.interior_nodes();
    DNMatrix d;
    d.kernel_hash = kernel_hash;
    d.s = s;
    d.values = block(solver.matrix(), ex, ex) + block(solver.matrix(), ex, in) * solver.interior_response();
    return d;
}

double dn_symmetry_residual(const DNMatrix& d) {
    const double peak = d.values.cwiseAbs().maxCoeff();
    const double asym = (d.values - d.values.transpose()).cwiseAbs().maxCoeff();
    return peak > 0.0 ? asym / peak : asym;
}

DNMatrix dn_map(const DirichletSolver& solver, const Eigen::MatrixXd& src, const Eigen::MatrixXd& tgt, std::uint64_t kernel_hash,
                double s) {
    const Grid& g = solver.grid();
    for (auto a : g.interior_nodes()) {
        const auto ia = static_cast<Eigen::Index>(a);
        if (src.row(ia).squaredNorm() != 0.0 || tgt.row(ia).squaredNorm() != 0.0)
            throw Error("dn_map: basis fields must vanish in omega");
    }
    Eigen::MatrixXd U(src.rows(), src.cols());
    for (Eigen::Index j = 0; j < src.cols(); ++j) U.col(j) = solver.poisson(src.col(j));
    DNMatrix d;
    d.kernel_hash = kernel_hash;
    d.s = s;
    d.values = tgt.transpose() * (solver.matrix() * U);
    return d;
}

namespace {

void check_gauge_pair(const Grid& g, const PhiSequence& phi1, const PhiSequence& phi2) {
    if (phi1.size() != phi2.size()) throw Error("alessandrini: sequences differ in length");
    for (std::size_t k = 0; k < phi1.size(); ++k)
        for (auto a : g.exterior_nodes()) {
            const auto ia = static_cast<Eigen::Index>(a);
            if (phi1.entries[k].field.values.row(ia) != phi2.entries[k].field.values.row(ia))
                throw Error("alessandrini: second sequence is not a gauge transform of the first (exterior mismatch)");
        }
}

}  // namespace

AlessandriniReport alessandrini_check(const Grid& g, const PhiSequence& phi1, const PhiSequence& phi2, double s, const Field& f1,
                                      const Field& f2, int pad) {
    check_gauge_pair(g, phi1, phi2);
    const DirichletSolver s1(g, assemble_bilinear(g, kernel_from_phi(g, phi1), s).M);
    const DirichletSolver s2(g, assemble_bilinear(g, kernel_from_phi(g, phi2), s).M);
    const Field u1 = s1.poisson(f1);
    const Field u12 = s2.poisson(f1);
    const Field u2 = s2.poisson(f2);

    AlessandriniReport r;
    r.lhs = f2.dot(s1.matrix() * u1) - f2.dot(s2.matrix() * u12);

    const TransformedPotential q1 = build_Q(g, phi1, s, pad);
    const TransformedPotential q2 = build_Q(g, phi2, s, pad);
    const Sequence w1 = reduce(u1, phi1);
    const Sequence w2 = reduce(u2, phi2);
    const Sequence a = q1.apply(w1);
    const Sequence b = q2.apply(w1);
    Sequence diff = a;
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k].values -= b[k].values;
    r.rhs = g.weight() * tridot(diff, w2).sum();

    r.energy_scale = std::sqrt(std::abs(u1.dot(s1.matrix() * u1)) * std::abs(u2.dot(s2.matrix() * u2)));
    r.residual = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.lhs), 1e-12 * r.energy_scale);
    return r;
}

RungeReport runge_residual(const DirichletSolver& solver, const PhiSequence& phi, const Field& target, const Eigen::MatrixXd& basis) {
    const Grid& g = solver.grid();
    const auto& in = g.interior_nodes();
    const auto I = static_cast<Eigen::Index>(in.size());
    auto restrict = [&](const Field& u) {
        Field out(I);
        for (Eigen::Index i = 0; i < I; ++i) out[i] = u[static_cast<Eigen::Index>(in[static_cast<std::size_t>(i)])];
        return out;
    };

    RungeReport rep;
    rep.a4 = exterior_isotropic(g, phi);
    rep.label = rep.a4 ? "supported" : "unsupported-by-theory";

    const Field t = restrict(target);
    const double tn = t.norm();
    if (tn == 0.0) throw Error("runge: target vanishes in omega");
    Field r = t;
    std::vector<Field> q;
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        const Field f = basis.col(j);
        Field v = restrict(solver.poisson(f) - f);
        const double vn = v.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& e : q) v -= e.dot(v) * e;
        if (vn > 0.0 && v.norm() > 1e-12 * vn) {
            q.push_back(v / v.norm());
            r -= q.back().dot(r) * q.back();
        }
        rep.curve.push_back(r.norm() / tn);
    }
    return rep;
}

UniquenessReport uniqueness_experiment(const Grid& g, const PhiSequence& phi1, const Field& rho, double s, int m1, int m2) {
    const Eigen::MatrixXd src = hat_basis(g, 1, m1);
    const Eigen::MatrixXd tgt = hat_basis(g, 2, m2);
    const AnisotropyKernel a1 = kernel_from_phi(g, phi1);
    const DNMatrix d1 = dn_map(DirichletSolver(g, assemble_bilinear(g, a1, s).M), src, tgt);

    auto run = [&](const Field& r, double* kernel_gap) {
        const PhiSequence phi2 = apply_gauge(g, phi1, r);
        const AnisotropyKernel a2 = kernel_from_phi(g, phi2);
        if (kernel_gap) {
            double m = 0.0;
            const int dd = g.dim() * g.dim();
            for (auto x : g.interior_nodes())
                for (auto y : g.interior_nodes())
                    for (int c = 0; c < dd; ++c) m = std::max(m, std::abs(a1.at(x, y)[c] - a2.at(x, y)[c]));
            *kernel_gap = m;
        }
        const DNMatrix d2 = dn_map(DirichletSolver(g, assemble_bilinear(g, a2, s).M), src, tgt);
        const Eigen::MatrixXd diff = d1.values - d2.values;
        return Eigen::JacobiSVD<Eigen::MatrixXd>(diff).singularValues()(0);
    };

    UniquenessReport rep;
    rep.control = run(Field::Zero(static_cast<Eigen::Index>(g.size())), nullptr);
    rep.delta_dn = run(rho, &rep.delta_kernel);
    const double base = Eigen::JacobiSVD<Eigen::MatrixXd>(d1.values).singularValues()(0);
    rep.floor = std::max(rep.control, 1e-14 * base);
    rep.ratio = rep.delta_dn / rep.floor;
    rep.control_pass = rep.control <= 1e-10;
    rep.distinguish_pass = rep.delta_kernel > 0.0 ? rep.delta_dn >= 10.0 * rep.floor : rep.delta_dn <= 1e-10;
    return rep;
}

}  // namespace afc
