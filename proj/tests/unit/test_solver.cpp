#include "helpers.hpp"

#include "afc/conductivity.hpp"
#include "afc/error.hpp"
#include "afc/presets.hpp"
#include "afc/solver.hpp"

#include <doctest.h>

using namespace afc;
using afc::test::line;
using afc::test::rel;
using afc::test::square;

namespace {

PhiSequence preset(const Grid& g, const std::string& type) {
    PresetSpec p;
    p.type = type;
    return build_preset(g, p);
}

// Fractional Laplacian stiffness assembled from its scalar kernel, with the
// exterior of the box integrated in closed form.
Eigen::MatrixXd scalar_laplacian_matrix(const Grid& g, double s) {
    const auto P = static_cast<Eigen::Index>(g.size());
    const double cns = std::pow(4.0, s) * std::tgamma(0.5 + s) / (std::sqrt(M_PI) * std::abs(std::tgamma(-s)));
    const double w = g.weight(), L = g.L();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(P, P);
    for (Eigen::Index i = 0; i < P; ++i) {
        const double x = g.coord(static_cast<std::size_t>(i), 0);
        for (Eigen::Index j = 0; j < P; ++j) {
            if (i == j) continue;
            const double k = w * w * 0.5 * cns / std::pow(std::abs(x - g.coord(static_cast<std::size_t>(j), 0)), 1.0 + 2.0 * s);
            M(i, i) += 2.0 * k;
            M(i, j) -= 2.0 * k;
        }
        M(i, i) += 2.0 * w * 0.5 * cns * (std::pow(L - x, -2.0 * s) + std::pow(L + x, -2.0 * s)) / (2.0 * s);
    }
    return M;
}

}  // namespace

TEST_CASE("solver: zero data and linearity") {
    const Grid g = Grid::build(square(8));
    for (const char* t : {"identity", "diagonal-crystal", "rank-R-random"}) {
        const AnisotropyKernel a = kernel_from_phi(g, preset(g, t));
        const Solution z = solve_direct(g, a, 0.5, {Field::Zero(64), Field::Zero(64)});
        CHECK(l2_norm(g, z.u) <= 1e-12);
    }
    const DirichletSolver solver(g, assemble_bilinear(g, kernel_from_phi(g, preset(g, "rank-R-random")), 0.5).M);
    const Field f1 = window_bump(g, 1), f2 = window_bump(g, 2);
    const Field sum = solver.poisson(f1 + f2), parts = solver.poisson(f1) + solver.poisson(f2);
    CHECK(rel(sum, parts) <= 1e-12);
    const Solution s = solver.solve({f1, Field()});
    CHECK(s.residual <= 1e-10);
    for (auto x : g.exterior_nodes()) CHECK(s.u[static_cast<Eigen::Index>(x)] == f1[static_cast<Eigen::Index>(x)]);
    CHECK(s.stability > 0.0);
}

TEST_CASE("solver: identity kernel against a scalar oracle") {
    const Grid g = Grid::build(line(64));
    const double s = 0.45;
    const Field f = window_bump(g, 1);
    const Solution sol = solve_direct(g, kernel_from_phi(g, preset(g, "identity")), s, {f, Field()});

    const Eigen::MatrixXd M = scalar_laplacian_matrix(g, s);
    const auto& in = g.interior_nodes();
    const auto& ex = g.exterior_nodes();
    const Eigen::MatrixXd Moo = block(M, in, in), Moe = block(M, in, ex);
    Field fe(static_cast<Eigen::Index>(ex.size()));
    for (std::size_t k = 0; k < ex.size(); ++k) fe[static_cast<Eigen::Index>(k)] = f[static_cast<Eigen::Index>(ex[k])];
    const Field ui = Moo.ldlt().solve(-Moe * fe);
    Field u = f;
    for (std::size_t k = 0; k < in.size(); ++k) u[static_cast<Eigen::Index>(in[k])] = ui[static_cast<Eigen::Index>(k)];
    CHECK(rel(sol.u, u) <= 1e-10);
}

TEST_CASE("solver: source term") {
    const Grid g = Grid::build(line(64));
    const DirichletSolver solver(g, assemble_bilinear(g, kernel_from_phi(g, preset(g, "isotropic-separable")), 0.3).M);
    const Field F = g.weight() * omega_bump(g);
    const Solution s = solver.solve({Field(), F});
    CHECK(s.residual <= 1e-10);
    for (auto x : g.interior_nodes()) CHECK((solver.matrix() * s.u)[static_cast<Eigen::Index>(x)] == doctest::Approx(F[static_cast<Eigen::Index>(x)]).epsilon(1e-9));
}

TEST_CASE("solver: transformed problem") {
    const double s = 0.45;
    SUBCASE("zero datum") {
        const Grid g = Grid::build(line(64));
        const PhiSequence phi = preset(g, "isotropic-separable");
        const TransformedPotential q = build_Q(g, phi, s, 8);
        const TransformedSolution t = solve_transformed(g, phi, q, reduce(Field::Zero(64), phi), Field());
        CHECK(t.u.norm() == 0.0);
    }
    SUBCASE("pair path reproduces the direct solve") {
        for (const GridConfig& cfg : {line(64), square(8)}) {
            const Grid g = Grid::build(cfg);
            const PhiSequence phi = preset(g, "isotropic-separable");
            const TransformedPotential q = build_Q(g, phi, s, 8);
            const Field f = window_bump(g, 1);
            const Solution d = solve_direct(g, kernel_from_phi(g, phi), s, {f, Field()});
            const TransformedSolution t = solve_transformed(g, phi, q, reduce(f, phi), Field(), TransformedPath::Pair);
            CHECK(rel(t.u, d.u) <= 1e-9);
            CHECK(t.residual <= 1e-9);
            const TransformedSolution sp = solve_transformed(g, phi, q, reduce(f, phi), Field(), TransformedPath::Spectral);
            CHECK(sp.residual <= 1e-9);
            CHECK(rel(sp.u, d.u) < 0.05);
        }
    }
    SUBCASE("spectral path converges to the direct solve") {
        std::vector<double> gap;
        for (int N : {64, 128}) {
            const Grid g = Grid::build(line(N));
            const PhiSequence phi = preset(g, "isotropic-separable");
            const Field f = window_bump(g, 1);
            const Solution d = solve_direct(g, kernel_from_phi(g, phi), s, {f, Field()});
            const TransformedSolution t = solve_transformed(g, phi, build_Q(g, phi, s, 8), reduce(f, phi), Field());
            gap.push_back(rel(t.u, d.u));
        }
        CHECK(gap[1] < gap[0]);
    }
    SUBCASE("gauge pair shares the exterior trace") {
        const Grid g = Grid::build(line(64));
        const PhiSequence p1 = preset(g, "isotropic-separable");
        const PhiSequence p2 = apply_gauge(g, p1, 0.3 * omega_bump(g));
        const Field f = window_bump(g, 1);
        const TransformedSolution a = solve_transformed(g, p1, build_Q(g, p1, s, 8), reduce(f, p1), Field(), TransformedPath::Pair);
        const TransformedSolution b = solve_transformed(g, p2, build_Q(g, p2, s, 8), reduce(f, p2), Field(), TransformedPath::Pair);
        for (auto x : g.exterior_nodes()) CHECK(a.u[static_cast<Eigen::Index>(x)] == b.u[static_cast<Eigen::Index>(x)]);
        CHECK(rel(a.u, b.u) > 1e-6);
    }
    SUBCASE("datum outside the Phi-image") {
        const Grid g = Grid::build(square(8));
        const PhiSequence phi = preset(g, "diagonal-crystal");
        Sequence bad = reduce(window_bump(g, 1), phi);
        bad[0] = MatrixField::scaled_identity(window_bump(g, 1), 2);
        CHECK_THROWS_AS(solve_transformed(g, phi, build_Q(g, phi, s, 8), bad, Field()), Error);
    }
}

TEST_CASE("solver: well-posedness report") {
    const Grid g = Grid::build(square(8));
    const AnisotropyKernel id = kernel_from_phi(g, preset(g, "identity"));
    const WellposednessReport base = wellposedness_report(g, assemble_bilinear(g, id, 0.5).M);
    CHECK(base.coercivity > 0.0);
    CHECK(std::isfinite(base.condition));

    const AnisotropyKernel k = kernel_from_phi(g, preset(g, "rank-R-random"));
    const double k0 = wellposedness_report(g, assemble_bilinear(g, k, 0.5).M).coercivity;
    double prev = k0;
    for (double c : {0.5, 1.0}) {
        const double now = wellposedness_report(g, assemble_bilinear(g, k - scaled(id, -c), 0.5).M).coercivity;
        CHECK(now >= k0 + c * base.coercivity * (1 - 1e-12));
        CHECK(now > prev);
        prev = now;
    }

    const Eigen::MatrixXd neg = assemble_bilinear(g, scaled(id, -1.0), 0.5).M;
    CHECK(wellposedness_report(g, neg).indefinite);
    CHECK_THROWS_AS(DirichletSolver(g, neg), Error);
}
