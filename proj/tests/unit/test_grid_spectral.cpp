#include "helpers.hpp"

#include "afc/error.hpp"
#include "afc/spectral.hpp"

#include <doctest.h>

#include <random>

using namespace afc;
using afc::test::line;
using afc::test::rel;
using afc::test::square;

TEST_CASE("grid: regions, weights and validation") {
    const Grid g = Grid::build(line());
    CHECK(g.size() == 128);
    CHECK(g.weights().sum() == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
    CHECK(g.coord(0, 0) == doctest::Approx(-M_PI + 0.5 * g.h()));
    for (std::size_t a : g.window_nodes(1)) CHECK(g.exterior(a));
    CHECK(!g.interior_nodes().empty());

    GridConfig bad = line();
    bad.w1 = {{1.0}, {2.0}};
    CHECK_THROWS_AS(Grid::build(bad), Error);
    bad = line();
    bad.N = 100;
    CHECK_THROWS_AS(Grid::build(bad), Error);
    bad = line();
    bad.omega = {{-3.1}, {1.0}};
    CHECK_THROWS_AS(Grid::build(bad), Error);

    const Grid g2 = Grid::build(square());
    CHECK(g2.weights().sum() == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-14));
    const auto idx = g2.index(37);
    CHECK(g2.node(idx) == 37);
}

TEST_CASE("spectral: plane wave and constants") {
    const Grid g = Grid::build(line(64));
    const double s = 0.35;
    for (int k : {1, 3, 7}) {
        const Field u = g.sample([&](const double* x) { return std::cos(k * x[0]); });
        const Field out = frac_laplacian_spectral(g, u, s);
        CHECK(rel(out, std::pow(k, 2.0 * s) * u) < 1e-12);
    }
    const Field c = Field::Constant(64, 2.5);
    CHECK(frac_laplacian_spectral(g, c, 0.7).norm() < 1e-12);

    const Grid g2 = Grid::build(square(16));
    const Field w = g2.sample([](const double* x) { return std::cos(2.0 * x[0] + x[1]); });
    CHECK(rel(frac_laplacian_spectral(g2, w, 0.5), std::sqrt(5.0) * w) < 1e-12);
}

TEST_CASE("spectral: symbol composition recovers the mean-free part") {
    const Grid g = Grid::build(line(128));
    const Field u = g.sample([](const double* x) { return std::exp(-x[0] * x[0] / (2 * 0.3 * 0.3)); });
    const Field back = frac_laplacian_spectral(g, frac_laplacian_spectral(g, u, 0.4), -0.4);
    const Field mean_free = u.array() - u.mean();
    CHECK(rel(back, mean_free) <= 1e-10);

    const Field two = frac_laplacian_spectral(g, frac_laplacian_spectral(g, u, 0.3), 0.25);
    CHECK(rel(two, frac_laplacian_spectral(g, u, 0.55)) <= 1e-10);
}

TEST_CASE("spectral: self-adjointness on random fields") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (const GridConfig& cfg : {line(64), square(16)}) {
        const Grid g = Grid::build(cfg);
        Field u(static_cast<Eigen::Index>(g.size())), v(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            u[i] = n01(rng);
            v[i] = n01(rng);
        }
        for (double t : {-0.6, 0.3, 0.9}) {
            const double a = inner(g, frac_laplacian_spectral(g, u, t), v);
            const double b = inner(g, u, frac_laplacian_spectral(g, v, t));
            CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1.0));
        }
    }
}

TEST_CASE("spectral: Parseval and Sobolev monotonicity") {
    const Grid g = Grid::build(line(128));
    const Field c = g.sample([](const double* x) { return std::cos(x[0]); });
    CHECK(sobolev_norm(g, c, 0.0) == doctest::Approx(l2_norm(g, c)).epsilon(1e-12));
    CHECK(sobolev_norm(g, Field::Zero(128), 1.0) == 0.0);
    const Field b = omega_bump(g);
    CHECK(sobolev_norm(g, b, 0.0) == doctest::Approx(l2_norm(g, b)).epsilon(1e-12));
    CHECK(sobolev_norm(g, b, 1.0) >= sobolev_norm(g, b, 0.0));
    CHECK(sobolev_norm(g, b, 0.0) >= sobolev_norm(g, b, -1.0));
    // cos(x) has |xi| = 1, so (1 + 1)^{r/2} scales the norm exactly
    CHECK(sobolev_norm(g, c, 1.0) == doctest::Approx(std::sqrt(2.0) * l2_norm(g, c)).epsilon(1e-12));
}

TEST_CASE("spectral: Poincare ratio") {
    const PoincareReport zero = poincare_check(Grid::build(line(64)), Field::Zero(64), 0.0, 0.5);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.ratio == 0.0);

    std::vector<double> ratios;
    for (int N : {64, 128, 256}) {
        const Grid g = Grid::build(line(N));
        const PoincareReport r = poincare_check(g, omega_bump(g), 0.0, 0.5);
        CHECK(std::isfinite(r.ratio));
        CHECK(r.ratio > 0.0);
        ratios.push_back(r.ratio);
    }
    CHECK(std::abs(ratios[1] / ratios[0] - 1.0) < 0.1);
    CHECK(std::abs(ratios[2] / ratios[1] - 1.0) < 0.1);

    const Grid g = Grid::build(line(64));
    CHECK_THROWS_AS(poincare_check(g, window_bump(g, 1), 0.0, 0.5), Error);
}

TEST_CASE("spectral: derivatives against closed forms") {
    const Grid g = Grid::build(line(64));
    const Field u = g.sample([](const double* x) { return std::sin(2.0 * x[0]); });
    const Field du = g.sample([](const double* x) { return 2.0 * std::cos(2.0 * x[0]); });
    CHECK(rel(derivative(g, u, 0), du) < 1e-12);
    CHECK(rel(laplacian(g, u), -4.0 * u) < 1e-12);

    const Grid g2 = Grid::build(square(16));
    const Field w = g2.sample([](const double* x) { return std::sin(x[0]) * std::cos(2.0 * x[1]); });
    const Field dxy = g2.sample([](const double* x) { return -2.0 * std::cos(x[0]) * std::sin(2.0 * x[1]); });
    CHECK(rel(second_derivative(g2, w, 0, 1), dxy) < 1e-12);
    CHECK(rel(laplacian(g2, w), -5.0 * w) < 1e-12);
}

TEST_CASE("spectral: convolution kernel reproduces the multiplier") {
    const Grid g = Grid::build(line(32));
    const Multiplier m = [](const Frequency& f) { return std::complex<double>(std::pow(f.xi[0] * f.xi[0], 0.3), 0.0); };
    const Field u = omega_bump(g);
    const Field ref = apply_multiplier(g, u, m, 4);
    const ConvolutionKernel k(g, m, 4);
    Field got = Field::Zero(32);
    for (std::size_t a = 0; a < 32; ++a)
        for (std::size_t b = 0; b < 32; ++b) got[static_cast<Eigen::Index>(a)] += k.between(a, b) * u[static_cast<Eigen::Index>(b)];
    CHECK(rel(got, ref) < 1e-10);
}
