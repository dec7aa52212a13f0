#include "helpers.hpp"

#include "afc/conductivity.hpp"
#include "afc/nonlocal.hpp"
#include "afc/presets.hpp"
#include "afc/solver.hpp"

#include <doctest.h>

using namespace afc;
using afc::test::line;
using afc::test::rel;
using afc::test::square;

namespace {

AnisotropyKernel preset_kernel(const Grid& g, const std::string& type) {
    PresetSpec p;
    p.type = type;
    return kernel_from_phi(g, build_preset(g, p));
}

double pair_norm(const Grid& g, const Field& u, double s) { return std::sqrt(pair_norm_sq(g, u, s, false)); }

}  // namespace

TEST_CASE("conductivity: identity kernel collapses to the pair norm") {
    for (const GridConfig& cfg : {line(64), square(8)}) {
        const Grid g = Grid::build(cfg);
        const AnisotropyKernel id = preset_kernel(g, "identity");
        const Field u = random_smooth_field(g, 17);
        for (bool closure : {false, true}) {
            const StiffnessOperator op = assemble_bilinear(g, id, 0.4, closure);
            const double um = u.dot(op.M * u);
            CHECK(um == doctest::Approx(pair_norm_sq(g, u, 0.4, closure)).epsilon(1e-12));
            CHECK(rel(apply_operator(g, id, 0.4, u, closure), frac_laplacian_pair(g, u, 0.4, closure)) <= 1e-12);
        }
        CHECK(apply_operator(g, id, 0.4, Field::Constant(static_cast<Eigen::Index>(g.size()), 2.0), false).norm() <= 1e-12);
    }
}

TEST_CASE("conductivity: operator, bilinear form and matrix agree") {
    const Grid g = Grid::build(square(8));
    const AnisotropyKernel a = preset_kernel(g, "diagonal-crystal");
    const StiffnessOperator op = assemble_bilinear(g, a, 0.6);
    const Field u = random_smooth_field(g, 1), v = random_smooth_field(g, 2);
    const double m = u.dot(op.M * v);
    CHECK(inner(g, apply_operator(g, a, 0.6, u), v) == doctest::Approx(m).epsilon(1e-12));
    CHECK(bilinear(g, a, 0.6, u, v) == doctest::Approx(m).epsilon(1e-12));
    CHECK((op.M - op.M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * op.M.cwiseAbs().maxCoeff());
}

TEST_CASE("conductivity: boundedness and coercivity") {
    const Grid g = Grid::build(square(8));
    const AnisotropyKernel r = random_kernel(g, 8);
    const double amax = r.max_abs();
    for (std::uint64_t t = 0; t < 5; ++t) {
        const Field u = random_smooth_field(g, 100 + t), v = random_smooth_field(g, 200 + t);
        CHECK(std::abs(bilinear(g, r, 0.5, u, v, false)) <= amax * pair_norm(g, u, 0.5) * pair_norm(g, v, 0.5) * (1 + 1e-12));
    }

    PresetSpec p;
    p.type = "rank-R-random";
    const PhiSequence phi = build_preset(g, p);
    const AnisotropyKernel k = kernel_from_phi(g, phi);
    const double nu = preset_nu(g, p), kmax = k.max_abs();
    for (std::uint64_t t = 0; t < 5; ++t) {
        const Field u = random_smooth_field(g, 300 + t, true);
        const double b = bilinear(g, k, 0.5, u, u, false);
        CHECK(b >= nu * pair_norm_sq(g, u, 0.5, false));
        CHECK(b <= kmax * pair_norm_sq(g, u, 0.5, false) * (1 + 1e-12));
    }
}

TEST_CASE("conductivity: isotropic separable kernel matches a scalar assembly") {
    const Grid g = Grid::build(line(64));
    PresetSpec p;
    p.type = "isotropic-separable";
    p.amplitude = 0.8;
    const AnisotropyKernel a = kernel_from_phi(g, build_preset(g, p));
    const double s = 0.35;
    const Field root = (Field::Ones(64) + 0.8 * omega_bump(g, p.fraction)).cwiseSqrt();
    const double cns = std::tgamma(0.5 + s) * std::pow(4.0, s) / (std::sqrt(M_PI) * std::abs(std::tgamma(-s)));
    const double w = g.weight();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(64, 64);
    for (Eigen::Index i = 0; i < 64; ++i)
        for (Eigen::Index j = 0; j < 64; ++j) {
            if (i == j) continue;
            const double r = std::abs(g.coord(static_cast<std::size_t>(i), 0) - g.coord(static_cast<std::size_t>(j), 0));
            // (u(y) - u(x))(v(y) - v(x)) sigma(x, y) |zeta|^2 summed over ordered pairs
            const double k = w * w * root[i] * root[j] * 0.5 * cns / std::pow(r, 1.0 + 2.0 * s);
            M(i, i) += k;
            M(j, j) += k;
            M(i, j) -= k;
            M(j, i) -= k;
        }
    const Eigen::MatrixXd got = assemble_bilinear(g, a, s, false).M;
    CHECK((got - M).cwiseAbs().maxCoeff() <= 1e-12 * M.cwiseAbs().maxCoeff());
}

TEST_CASE("conductivity: gauge invariance and self-adjointness") {
    const Grid g = Grid::build(square(8));
    const AnisotropyKernel r = random_kernel(g, 21);
    CHECK(gauge_invariance_residual(g, r, 0.4, 10, 5) <= 1e-12);
    const Symmetrization s = symmetrize(r);
    CHECK(gauge_invariance_residual(g, s.s, 0.4, 5, 5) == 0.0);

    const Field u = random_smooth_field(g, 41), v = random_smooth_field(g, 42);
    const double anti = bilinear(g, s.a, 0.4, u, v, false);
    CHECK(std::abs(anti) <= 1e-12 * r.max_abs() * pair_norm(g, u, 0.4) * pair_norm(g, v, 0.4));

    CHECK(self_adjointness_residual(g, s.s, 0.4, 5, 7) <= 1e-12);
    CHECK(self_adjointness_residual(g, preset_kernel(g, "identity"), 0.4, 5, 7) <= 1e-12);
    CHECK(self_adjointness_residual(g, r, 0.4, 5, 7) <= 1e-12);
}

TEST_CASE("conductivity: interior block positive definite under positivity") {
    const Grid g = Grid::build(square(8));
    for (const char* t : {"identity", "isotropic-separable", "diagonal-crystal", "rank-R-random"}) {
        const WellposednessReport wp = wellposedness_report(g, assemble_bilinear(g, preset_kernel(g, t), 0.5).M);
        CHECK(wp.coercivity > 0.0);
        CHECK_FALSE(wp.indefinite);
    }
}
