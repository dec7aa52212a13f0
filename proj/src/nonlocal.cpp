#include "afc/nonlocal.hpp"

#include "afc/error.hpp"
#include "afc/parallel.hpp"

#include <cmath>

namespace afc {

MatrixField MatrixField::constant(std::size_t nodes, const Eigen::MatrixXd& m) {
    MatrixField f(nodes, static_cast<int>(m.rows()));
    for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j) f.values.col(i * f.dim + j).setConstant(m(i, j));
    return f;
}

MatrixField MatrixField::scaled_identity(const Field& v, int dim) {
    MatrixField f(static_cast<std::size_t>(v.size()), dim);
    for (int i = 0; i < dim; ++i) f.values.col(i * dim + i) = v;
    return f;
}

Field frobenius(const MatrixField& m, const MatrixField& n) { return m.values.cwiseProduct(n.values).rowwise().sum(); }

PairField::PairField(const Grid& g, PairShape sh) : grid_hash(g.hash()), nodes(g.size()), shape(sh) {
    comps = sh == PairShape::Scalar ? 1 : (sh == PairShape::Vector ? g.dim() : g.dim() * g.dim());
    data.assign(nodes * nodes * static_cast<std::size_t>(comps), 0.0);
}

double cns_constant(int n, double s) {
    if (!(s > 0.0 && s < 1.0)) throw Error("cns_constant: s must lie in (0, 1)");
    return std::pow(4.0, s) * std::tgamma(0.5 * n + s) / (std::pow(M_PI, 0.5 * n) * std::abs(std::tgamma(-s)));
}

ZetaKernel::ZetaKernel(int n, double s) : n_(n), s_(s), c_(cns_constant(n, s)) {
    pref_ = std::sqrt(c_) / std::sqrt(2.0);
    expo_ = -0.5 * (0.5 * n + s + 1.0);
}

void ZetaKernel::eval(const double* x, const double* y, double* out) const {
    double r2 = 0.0;
    for (int a = 0; a < n_; ++a) {
        out[a] = x[a] - y[a];
        r2 += out[a] * out[a];
    }
    if (r2 == 0.0) {
        for (int a = 0; a < n_; ++a) out[a] = 0.0;
        return;
    }
    const double f = pref_ * std::pow(r2, expo_);
    for (int a = 0; a < n_; ++a) out[a] *= f;
}

PairField frac_gradient(const Grid& g, const Field& u, double s) {
    if (static_cast<std::size_t>(u.size()) != g.size()) throw Error("frac_gradient: field size does not match grid");
    ZetaKernel zeta(g.dim(), s);
    PairField out(g, PairShape::Vector);
    const std::size_t P = g.size();
    const int d = g.dim();
    parallel_for(P, [&](std::size_t i) {
        const auto xi = g.point(i);
        const double ui = u[static_cast<Eigen::Index>(i)];
        double z[2];
        for (std::size_t j = 0; j < P; ++j) {
            if (j == i) continue;
            const auto yj = g.point(j);
            zeta.eval(xi.data(), yj.data(), z);
            const double du = u[static_cast<Eigen::Index>(j)] - ui;
            double* o = out.at(i, j);
            for (int a = 0; a < d; ++a) o[a] = du * z[a];
        }
    });
    return out;
}

Field frac_divergence(const Grid& g, const PairField& v, double s) {
    if (v.grid_hash != g.hash() || v.nodes != g.size()) throw Error("frac_divergence: pair field belongs to another grid");
    if (v.shape != PairShape::Vector) throw Error("frac_divergence: expects a vector-valued pair field");
    ZetaKernel zeta(g.dim(), s);
    const std::size_t P = g.size();
    const int d = g.dim();
    const double w = g.weight();
    Field out = Field::Zero(static_cast<Eigen::Index>(P));
    parallel_for(P, [&](std::size_t z) {
        const auto pz = g.point(z);
        double zx[2], zz[2];
        double acc = 0.0;
        for (std::size_t x = 0; x < P; ++x) {
            if (x == z) continue;
            const auto px = g.point(x);
            zeta.eval(px.data(), pz.data(), zx);
            zeta.eval(pz.data(), px.data(), zz);
            const double* a = v.at(x, z);
            const double* b = v.at(z, x);
            double term = 0.0;
            for (int c = 0; c < d; ++c) term += a[c] * zx[c] - b[c] * zz[c];
            acc += w * term;
        }
        out[static_cast<Eigen::Index>(z)] = acc;
    });
    return out;
}

double pair_inner(const Grid& g, const PairField& a, const PairField& b) {
    if (a.data.size() != b.data.size() || a.comps != b.comps) throw Error("pair_inner: shape mismatch");
    if (a.grid_hash != g.hash() || b.grid_hash != g.hash()) throw Error("pair_inner: pair field belongs to another grid");
    const std::size_t P = g.size();
    const std::size_t row = P * static_cast<std::size_t>(a.comps);
    std::vector<double> rows(P, 0.0);
    parallel_for(P, [&](std::size_t i) {
        double acc = 0.0;
        const double* pa = a.data.data() + i * row;
        const double* pb = b.data.data() + i * row;
        for (std::size_t k = 0; k < row; ++k) acc += pa[k] * pb[k];
        rows[i] = acc;
    });
    double total = 0.0;
    for (double r : rows) total += r;
    return g.weight() * g.weight() * total;
}

namespace {

// Gauss-Legendre rule on [-1, 1] from the Golub-Welsch eigenproblem.
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(static_cast<std::size_t>(m));
    weights.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
        const double v = es.eigenvectors()(0, k);
        weights[static_cast<std::size_t>(k)] = 2.0 * v * v;
    }
}

}  // namespace

MatrixField far_field_tensor(const Grid& g, double s) {
    const double c = cns_constant(g.dim(), s);
    const double L = g.L();
    const double pref = 0.5 * c / (2.0 * s);
    MatrixField T(g.size(), g.dim());
    if (g.dim() == 1) {
        for (std::size_t a = 0; a < g.size(); ++a) {
            const double x = g.coord(a, 0);
            T.at(a, 0, 0) = pref * (std::pow(L - x, -2.0 * s) + std::pow(x + L, -2.0 * s));
        }
        return T;
    }
    // Polar coordinates about x: int_{r_b(theta)}^inf r^{-1-2s} dr = r_b^{-2s} / (2s).
    // The exit distance r_b is analytic between corner directions, so each face is
    // integrated with its own Gauss-Legendre rule.
    std::vector<double> gx, gw;
    gauss_legendre(64, gx, gw);
    for (std::size_t a = 0; a < g.size(); ++a) {
        const auto p = g.point(a);
        const double dr = L - p[0], dl = p[0] + L, dt = L - p[1], db = p[1] + L;
        const double c1 = std::atan2(dt, dr);
        const double c2 = M_PI - std::atan2(dt, dl);
        const double c3 = M_PI + std::atan2(db, dl);
        const double c4 = 2.0 * M_PI - std::atan2(db, dr);
        const double lo[4] = {c4 - 2.0 * M_PI, c1, c2, c3};
        const double hi[4] = {c1, c2, c3, c4};
        double t00 = 0.0, t01 = 0.0, t11 = 0.0;
        for (int face = 0; face < 4; ++face) {
            const double mid = 0.5 * (lo[face] + hi[face]);
            const double half = 0.5 * (hi[face] - lo[face]);
            for (std::size_t k = 0; k < gx.size(); ++k) {
                const double th = mid + half * gx[k];
                const double ct = std::cos(th), st = std::sin(th);
                double rb;
                switch (face) {
                    case 0: rb = dr / ct; break;
                    case 1: rb = dt / st; break;
                    case 2: rb = -dl / ct; break;
                    default: rb = -db / st; break;
                }
                const double f = half * gw[k] * std::pow(rb, -2.0 * s);
                t00 += f * ct * ct;
                t01 += f * ct * st;
                t11 += f * st * st;
            }
        }
        T.at(a, 0, 0) = pref * t00;
        T.at(a, 0, 1) = pref * t01;
        T.at(a, 1, 0) = pref * t01;
        T.at(a, 1, 1) = pref * t11;
    }
    return T;
}

Field frac_laplacian_pair(const Grid& g, const Field& u, double s, bool closure) {
    Field out = frac_divergence(g, frac_gradient(g, u, s), s);
    if (closure) {
        const MatrixField T = far_field_tensor(g, s);
        for (std::size_t a = 0; a < g.size(); ++a) {
            double tr = 0.0;
            for (int i = 0; i < g.dim(); ++i) tr += T.at(a, i, i);
            out[static_cast<Eigen::Index>(a)] += 2.0 * tr * u[static_cast<Eigen::Index>(a)];
        }
    }
    return out;
}

double pair_norm_sq(const Grid& g, const Field& u, double s, bool closure) {
    const PairField gu = frac_gradient(g, u, s);
    double total = pair_inner(g, gu, gu);
    if (closure) {
        const MatrixField T = far_field_tensor(g, s);
        for (std::size_t a = 0; a < g.size(); ++a) {
            double tr = 0.0;
            for (int i = 0; i < g.dim(); ++i) tr += T.at(a, i, i);
            total += 2.0 * g.weight() * tr * u[static_cast<Eigen::Index>(a)] * u[static_cast<Eigen::Index>(a)];
        }
    }
    return total;
}

KernelSplitResult kernel_split_residual(int n, const std::array<double, 2>& x, const std::array<double, 2>& y, double s,
                                        double eta) {
    if (n != 1 && n != 2) throw Error("kernel_split_residual: n must be 1 or 2");
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += (x[static_cast<std::size_t>(a)] - y[static_cast<std::size_t>(a)]) * (x[static_cast<std::size_t>(a)] - y[static_cast<std::size_t>(a)]);
    if (r2 == 0.0) throw Error("kernel_split_residual: x and y coincide");
    KernelSplitResult res;
    const double m = n + 2.0 * s - 2.0;
    if (std::abs(m) < 1e-12) {
        res.applicable = false;
        return res;
    }
    const double alpha = 1.0 / (n + 2.0 * s);
    const double beta = 1.0 / ((n + 2.0 * s) * m);
    auto f = [&](std::array<double, 2> px, std::array<double, 2> py) {
        double q = 0.0;
        for (int a = 0; a < n; ++a) q += (px[static_cast<std::size_t>(a)] - py[static_cast<std::size_t>(a)]) * (px[static_cast<std::size_t>(a)] - py[static_cast<std::size_t>(a)]);
        return std::pow(q, -0.5 * m);
    };
    const double r = std::sqrt(r2);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            auto shift = [&](std::array<double, 2> p, int axis, double h) {
                p[static_cast<std::size_t>(axis)] += h;
                return p;
            };
            const double hess = (f(shift(x, i, eta), shift(y, j, eta)) - f(shift(x, i, eta), shift(y, j, -eta)) -
                                 f(shift(x, i, -eta), shift(y, j, eta)) + f(shift(x, i, -eta), shift(y, j, -eta))) /
                                (4.0 * eta * eta);
            const double di = x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
            const double dj = x[static_cast<std::size_t>(j)] - y[static_cast<std::size_t>(j)];
            const double lhs = di * dj * std::pow(r, -(n + 2.0 * s + 2.0));
            const double rhs = (i == j ? alpha * std::pow(r, -(n + 2.0 * s)) : 0.0) - beta * hess;
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    res.residual = worst;
    return res;
}

}  // namespace afc
