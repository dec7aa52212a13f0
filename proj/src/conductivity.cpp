#include "afc/conductivity.hpp"

#include "afc/error.hpp"
#include "afc/nonlocal.hpp"
#include "afc/parallel.hpp"

#include <cmath>
#include <random>

namespace afc {

namespace {

void check_kernel(const Grid& g, const AnisotropyKernel& a) {
    if (a.grid_hash != g.hash() || a.nodes != g.size() || a.dim != g.dim()) throw Error("conductivity: kernel does not match the grid");
}

// (A_out(x) + A_in(x)) : T(x), the coefficient of u(x) v(x) w(x) from pairs leaving the box.
Field closure_coefficient(const Grid& g, const AnisotropyKernel& a, double s) {
    Field c = Field::Zero(static_cast<Eigen::Index>(g.size()));
    if (!a.far_out && !a.far_in) return c;
    const MatrixField T = far_field_tensor(g, s);
    if (a.far_out) c += frobenius(*a.far_out, T);
    if (a.far_in) c += frobenius(*a.far_in, T);
    return c;
}

PairField contract(const Grid& g, const AnisotropyKernel& a, const PairField& grad) {
    PairField out(g, PairShape::Vector);
    const std::size_t P = g.size();
    const int d = g.dim();
    parallel_for(P, [&](std::size_t x) {
        for (std::size_t y = 0; y < P; ++y) {
            const double* m = a.at(x, y);
            const double* v = grad.at(x, y);
            double* o = out.at(x, y);
            for (int i = 0; i < d; ++i) {
                double acc = 0.0;
                for (int j = 0; j < d; ++j) acc += m[i * d + j] * v[j];
                o[i] = acc;
            }
        }
    });
    return out;
}

}  // namespace

StiffnessOperator assemble_bilinear(const Grid& g, const AnisotropyKernel& a, double s, bool closure) {
    check_kernel(g, a);
    ZetaKernel zeta(g.dim(), s);
    const std::size_t P = g.size();
    const int d = g.dim();
    const double w2 = g.weight() * g.weight();
    // K(x, y) = zeta^T A(x, y) zeta, one row per worker.
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
    parallel_for(P, [&](std::size_t x) {
        const auto px = g.point(x);
        double z[2];
        for (std::size_t y = 0; y < P; ++y) {
            if (x == y) continue;
            const auto py = g.point(y);
            zeta.eval(px.data(), py.data(), z);
            const double* m = a.at(x, y);
            double acc = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) acc += z[i] * m[i * d + j] * z[j];
            K(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = acc;
        }
    });
    StiffnessOperator op;
    op.s = s;
    op.kernel_hash = a.hash();
    op.closure = closure;
    op.M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
    const Field cc = closure ? closure_coefficient(g, a, s) : Field::Zero(static_cast<Eigen::Index>(P));
    parallel_for(P, [&](std::size_t x) {
        const auto ix = static_cast<Eigen::Index>(x);
        double diag = 0.0;
        for (std::size_t y = 0; y < P; ++y) {
            if (x == y) continue;
            const auto iy = static_cast<Eigen::Index>(y);
            const double k = w2 * (K(ix, iy) + K(iy, ix));
            op.M(ix, iy) = -k;
            diag += k;
        }
        op.M(ix, ix) = diag + g.weight() * cc[ix];
    });
    return op;
}

Field apply_operator(const Grid& g, const AnisotropyKernel& a, double s, const Field& u, bool closure) {
    check_kernel(g, a);
    Field out = frac_divergence(g, contract(g, a, frac_gradient(g, u, s)), s);
    if (closure) out += closure_coefficient(g, a, s).cwiseProduct(u);
    return out;
}

double bilinear(const Grid& g, const AnisotropyKernel& a, double s, const Field& u, const Field& v, bool closure) {
    check_kernel(g, a);
    const PairField gu = frac_gradient(g, u, s);
    const PairField gv = frac_gradient(g, v, s);
    double total = pair_inner(g, contract(g, a, gu), gv);
    if (closure) total += g.weight() * closure_coefficient(g, a, s).cwiseProduct(u).dot(v);
    return total;
}

namespace {

double cs_scale(const Grid& g, const AnisotropyKernel& a, double s, const Field& u, const Field& v) {
    const bool fl = a.far_out || a.far_in;
    const double far = fl ? std::max(a.far_out ? a.far_out->values.cwiseAbs().maxCoeff() : 0.0,
                                     a.far_in ? a.far_in->values.cwiseAbs().maxCoeff() : 0.0)
                          : 0.0;
    const double amax = std::max(a.max_abs(), far) * g.dim();
    return amax * std::sqrt(pair_norm_sq(g, u, s, fl) * pair_norm_sq(g, v, s, fl));
}

}  // namespace

double gauge_invariance_residual(const Grid& g, const AnisotropyKernel& a, double s, int trials, std::uint64_t seed) {
    const AnisotropyKernel as = symmetrize(a).s;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Field u = random_smooth_field(g, seed + 2 * static_cast<std::uint64_t>(t));
        const Field v = random_smooth_field(g, seed + 2 * static_cast<std::uint64_t>(t) + 1);
        const double diff = bilinear(g, a, s, u, v) - bilinear(g, as, s, u, v);
        const double scale = cs_scale(g, a, s, u, v);
        if (scale > 0.0) worst = std::max(worst, std::abs(diff) / scale);
    }
    return worst;
}

double self_adjointness_residual(const Grid& g, const AnisotropyKernel& a, double s, int trials, std::uint64_t seed) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Field u = random_smooth_field(g, seed + 2 * static_cast<std::uint64_t>(t));
        const Field v = random_smooth_field(g, seed + 2 * static_cast<std::uint64_t>(t) + 1);
        const double cuv = inner(g, apply_operator(g, a, s, u), v);
        const double ucv = inner(g, u, apply_operator(g, a, s, v));
        const double scale = cs_scale(g, a, s, u, v);
        if (scale > 0.0) worst = std::max(worst, std::abs(cuv - ucv) / scale);
    }
    return worst;
}

Field random_smooth_field(const Grid& g, std::uint64_t seed, bool interior_only) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Field out = Field::Zero(static_cast<Eigen::Index>(g.size()));
    std::array<double, 2> lo{-g.L(), -g.L()}, hi{g.L(), g.L()};
    if (interior_only) {
        for (int a = 0; a < g.dim(); ++a) {
            lo[static_cast<std::size_t>(a)] = g.config().omega.lo[static_cast<std::size_t>(a)];
            hi[static_cast<std::size_t>(a)] = g.config().omega.hi[static_cast<std::size_t>(a)];
        }
    }
    double half = 1e300;
    std::array<double, 2> mid{0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        half = std::min(half, 0.5 * (hi[ua] - lo[ua]));
        mid[ua] = 0.5 * (hi[ua] + lo[ua]);
    }
    for (int k = 0; k < 3; ++k) {
        std::array<double, 2> c = mid;
        for (int a = 0; a < g.dim(); ++a) c[static_cast<std::size_t>(a)] += 0.4 * half * unit(rng);
        const double radius = half * (0.35 + 0.15 * unit(rng));
        const double amp = unit(rng);
        out += amp * bump(g, c, radius);
    }
    return out;
}

AnisotropyKernel random_kernel(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    AnisotropyKernel a(g);
    for (double& v : a.data) v = unit(rng);
    return a;
}

}  // namespace afc
