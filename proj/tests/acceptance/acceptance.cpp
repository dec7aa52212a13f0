#include "afc/conductivity.hpp"
#include "afc/config.hpp"
#include "afc/experiments.hpp"
#include "afc/inverse.hpp"
#include "afc/limit.hpp"
#include "afc/nonlocal.hpp"
#include "afc/parallel.hpp"
#include "afc/presets.hpp"
#include "afc/reduction.hpp"
#include "afc/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace afc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

GridConfig line(int N) {
    GridConfig c;
    c.dim = 1;
    c.L = M_PI;
    c.N = N;
    c.omega = {{-1.0}, {1.0}};
    c.w1 = {{-2.5}, {-1.5}};
    c.w2 = {{1.5}, {2.5}};
    return c;
}

GridConfig square(int N) {
    GridConfig c;
    c.dim = 2;
    c.L = M_PI;
    c.N = N;
    c.omega = {{-1.0, -1.0}, {1.0, 1.0}};
    c.w1 = {{-2.8, -0.6}, {-1.6, 0.6}};
    c.w2 = {{1.6, -0.6}, {2.8, 0.6}};
    return c;
}

PresetSpec preset(const std::string& type) {
    PresetSpec p;
    p.type = type;
    return p;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
    return out + "]";
}

double max_curve(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

Outcome adjointness() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), order(0.05, 0.95);
    double worst = 0.0, anti = 0.0, swap = 0.0;
    int trials = 0;
    for (const GridConfig& cfg : {line(32), square(8)}) {
        const Grid g = Grid::build(cfg);
        for (int t = 0; t < 60; ++t, ++trials) {
            const double s = order(rng);
            Field u(static_cast<Eigen::Index>(g.size()));
            for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = unit(rng);
            PairField V(g, PairShape::Vector);
            for (double& x : V.data) x = unit(rng);
            const PairField gu = frac_gradient(g, u, s);
            const double lhs = pair_inner(g, V, gu), rhs = inner(g, frac_divergence(g, V, s), u);
            worst = std::max(worst, std::abs(lhs - rhs) / std::sqrt(pair_inner(g, V, V) * pair_inner(g, gu, gu)));
            if (t % 20 == 0) {
                const ZetaKernel z(g.dim(), s);
                for (std::size_t x = 0; x < g.size(); ++x)
                    for (std::size_t y = 0; y < g.size(); ++y) {
                        double a[2], b[2];
                        z.eval(g.point(x).data(), g.point(y).data(), a);
                        z.eval(g.point(y).data(), g.point(x).data(), b);
                        for (int k = 0; k < g.dim(); ++k) {
                            anti = std::max(anti, std::abs(a[k] + b[k]));
                            swap = std::max(swap, std::abs(gu.at(x, y)[k] - gu.at(y, x)[k]));
                        }
                    }
            }
        }
    }
    return {trials >= 100 && worst <= 1e-12 && anti == 0.0 && swap == 0.0,
            std::to_string(trials) + " triples, max residual " + num(worst) + ", zeta antisymmetry " + num(anti) + ", swap " + num(swap)};
}

Outcome composition() {
    bool ok = true;
    std::string d;
    for (double s : {0.3, 0.5, 0.8}) {
        std::vector<double> e;
        for (int N : {64, 128, 256}) e.push_back(composition_error(Grid::build(line(N)), s));
        ok = ok && strictly_decreasing(e);
        d += "s=" + num(s) + " " + list(e) + " ";
    }
    return {ok, d};
}

Outcome gauge() {
    const Grid g = Grid::build(square(8));
    double worst = 0.0, lo = 1e300, hi = 0.0;
    for (std::uint64_t k = 0; k < 5; ++k) {
        const AnisotropyKernel a = random_kernel(g, 500 + k);
        const Symmetrization s = symmetrize(a);
        const double ratio = std::sqrt(std::inner_product(s.a.data.begin(), s.a.data.end(), s.a.data.begin(), 0.0) /
                                       std::inner_product(s.s.data.begin(), s.s.data.end(), s.s.data.begin(), 0.0));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        worst = std::max(worst, gauge_invariance_residual(g, a, 0.2 + 0.15 * static_cast<double>(k), 20, 900 + 31 * k));
    }
    return {worst <= 1e-12 && lo >= 0.3 && hi <= 3.0,
            "100 trials, max residual " + num(worst) + ", |A_a|/|A_s| in [" + num(lo) + ", " + num(hi) + "]"};
}

Outcome mercer() {
    const Grid g1 = Grid::build(line(64));
    PhiSequence r1;
    r1.dim = 1;
    r1.entries.push_back({PhiKind::Beta, MatrixField::scaled_identity(Field::Ones(64), 1)});
    r1.entries.push_back({PhiKind::Phi, MatrixField::scaled_identity(omega_bump(g1, 0.8), 1)});
    const MercerResult one = mercer_decompose(g1, kernel_from_phi(g1, r1), assemble_exterior(g1, r1.betas()));
    const bool rank1 = one.entries.size() == 1 && one.entries[0].eigenvalues.size() == 1 && one.max_residual <= 1e-10;

    const Grid g = Grid::build(square(16));
    double trace = 0.0, roundtrip = 0.0;
    for (int R : {1, 2, 4, 8}) {
        PresetSpec p = preset("rank-R-random");
        p.rank = R;
        p.seed = 77 + static_cast<std::uint64_t>(R);
        const PhiSequence phi = build_preset(g, p);
        const AnisotropyKernel k = kernel_from_phi(g, phi);
        const MercerResult m = mercer_decompose(g, k, assemble_exterior(g, phi.betas()));
        for (const auto& e : m.entries)
            if (e.trace_quadrature != 0.0) trace = std::max(trace, std::abs(e.trace_spectrum - e.trace_quadrature) / std::abs(e.trace_quadrature));
        const AnisotropyKernel back = kernel_from_phi(g, interleave(phi.betas(), m.phis, g.size(), 2));
        double diff = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < k.data.size(); ++i) {
            diff = std::max(diff, std::abs(back.data[i] - k.data[i]));
            peak = std::max(peak, std::abs(k.data[i]));
        }
        roundtrip = std::max(roundtrip, diff / peak);
    }
    return {rank1 && trace <= 1e-8 && roundtrip <= 1e-9,
            "rank-1 residual " + num(one.max_residual) + ", trace " + num(trace) + ", roundtrip (R<=8) " + num(roundtrip)};
}

Outcome reduction() {
    bool ok = true;
    std::string d;
    const double s = 0.45;
    auto curve = [&](const std::vector<GridConfig>& cfgs, const std::string& type) {
        std::vector<double> r;
        for (const auto& cfg : cfgs) {
            const Grid g = Grid::build(cfg);
            r.push_back(reduction_identity_residual(g, build_preset(g, preset(type)), s, omega_bump(g, 0.8), gaussian(g, 0.4), 8).residual);
        }
        ok = ok && strictly_decreasing(r);
        d += type + " " + list(r) + " ";
    };
    curve({line(64), line(128), line(256)}, "identity");
    curve({line(64), line(128), line(256)}, "isotropic-separable");
    curve({square(8), square(16), square(32)}, "diagonal-crystal");

    struct Case {
        int n;
        std::array<double, 2> x, y;
        double s;
    };
    for (const Case& c : {Case{2, {0.0, 0.0}, {1.0, 0.0}, 0.3}, Case{1, {0.0, 0.0}, {0.5, 0.0}, 0.75}}) {
        const double r = kernel_split_residual(c.n, c.x, c.y, c.s, 1e-4).residual;
        const double r1 = kernel_split_residual(c.n, c.x, c.y, c.s, 1e-2).residual;
        const double r2 = kernel_split_residual(c.n, c.x, c.y, c.s, 5e-3).residual;
        const double r3 = kernel_split_residual(c.n, c.x, c.y, c.s, 2.5e-3).residual;
        const double o1 = std::log2(r1 / r2), o2 = std::log2(r2 / r3);
        ok = ok && r <= 1e-6 && std::abs(o1 - 2.0) < 0.2 && std::abs(o2 - 2.0) < 0.2;
        d += "split n=" + std::to_string(c.n) + " " + num(r) + " orders " + num(o1) + "," + num(o2) + " ";
    }
    return {ok, d};
}

Outcome wellposed() {
    bool ok = true;
    double zero = 0.0, coercive = 1e300;
    for (const GridConfig& cfg : {line(64), square(16)}) {
        const Grid g = Grid::build(cfg);
        for (const char* t : {"identity", "isotropic-separable", "diagonal-crystal", "rank-R-random"}) {
            const PresetSpec p = preset(t);
            const AnisotropyKernel a = kernel_from_phi(g, build_preset(g, p));
            if (!check_positivity(a, preset_nu(g, p)).pass) {
                ok = false;
                continue;
            }
            const Eigen::MatrixXd M = assemble_bilinear(g, a, 0.45).M;
            const WellposednessReport wp = wellposedness_report(g, M);
            coercive = std::min(coercive, wp.coercivity);
            ok = ok && !wp.indefinite && wp.coercivity > 0.0;
            const auto P = static_cast<Eigen::Index>(g.size());
            zero = std::max(zero, l2_norm(g, DirichletSolver(g, M).solve({Field::Zero(P), Field::Zero(P)}).u));
        }
    }
    std::vector<double> gap;
    for (int N : {128, 256}) {
        const Grid g = Grid::build(line(N));
        const PhiSequence phi = build_preset(g, preset("isotropic-separable"));
        const Field f = window_bump(g, 1);
        const Solution d = solve_direct(g, kernel_from_phi(g, phi), 0.45, {f, Field()});
        const TransformedSolution t = solve_transformed(g, phi, build_Q(g, phi, 0.45, 8), reduce(f, phi), Field());
        gap.push_back(l2_norm(g, t.u - d.u) / l2_norm(g, d.u));
    }
    ok = ok && zero <= 1e-12 && strictly_decreasing(gap);
    return {ok, "zero-data " + num(zero) + ", min coercivity " + num(coercive) + ", two-path gap " + list(gap)};
}

Outcome dn_symmetry() {
    double worst = 0.0;
    int count = 0;
    for (const GridConfig& cfg : {line(128), square(16)}) {
        const Grid g = Grid::build(cfg);
        for (const char* t : {"identity", "isotropic-separable", "diagonal-crystal", "rank-R-random"}) {
            const DirichletSolver s(g, assemble_bilinear(g, kernel_from_phi(g, build_preset(g, preset(t))), 0.45).M);
            worst = std::max(worst, dn_symmetry_residual(dn_full(s)));
            ++count;
        }
    }
    return {worst <= 1e-10, std::to_string(count) + " kernels, max symmetry residual " + num(worst)};
}

Outcome alessandrini() {
    std::vector<double> r;
    std::vector<double> sides;
    for (int N : {128, 256}) {
        const Grid g = Grid::build(line(N));
        const PhiSequence p1 = build_preset(g, preset("isotropic-separable"));
        const PhiSequence p2 = apply_gauge(g, p1, 0.3 * omega_bump(g));
        const AlessandriniReport a = alessandrini_check(g, p1, p2, 0.45, window_bump(g, 1), window_bump(g, 2));
        r.push_back(a.residual);
        sides.push_back(a.lhs);
        sides.push_back(a.rhs);
    }
    return {r[0] < 1e-2 && r[1] < r[0], "residual N=128,256 " + list(r) + ", lhs/rhs " + list(sides)};
}

Outcome uniqueness() {
    const Grid g = Grid::build(line(128));
    const PhiSequence phi = build_preset(g, preset("isotropic-separable"));
    const UniquenessReport control = uniqueness_experiment(g, phi, Field::Zero(128), 0.45, 16, 16);
    const UniquenessReport run = uniqueness_experiment(g, phi, 0.5 * omega_bump(g), 0.45, 16, 16);
    const DirichletSolver s(g, assemble_bilinear(g, kernel_from_phi(g, phi), 0.45).M);
    const RungeReport rr = runge_residual(s, phi, omega_bump(g, 0.9), hat_basis(g, 1, 16));
    bool mono = true;
    for (std::size_t i = 1; i < rr.curve.size(); ++i) mono = mono && rr.curve[i] <= rr.curve[i - 1];
    const bool ok = control.delta_dn <= 1e-10 && run.delta_dn >= 10.0 * run.floor && rr.a4 && mono && rr.curve.back() <= 0.05;
    return {ok, "control " + num(control.delta_dn) + ", delta " + num(run.delta_dn) + " vs floor " + num(run.floor) + ", Runge M=16 " +
                    num(rr.curve.back()) + (mono ? " nonincreasing" : " NOT monotone")};
}

Outcome limit() {
    const std::vector<double> s_list{0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
    bool ok = true;
    std::string d;
    auto sweep = [&](const GridConfig& cfg, const std::string& type) {
        const Grid g = Grid::build(cfg);
        const PresetSpec p = preset(type);
        const PhiSequence phi = build_preset(g, p);
        const SweepResult r = s_sweep(g, phi, omega_bump(g, 0.8), s_list, limit_test_basis(g, 6), 8, false);
        const LimitPositivity lp = check_limit_matrix(limit_matrix(kernel_from_phi(g, phi)), preset_nu(g, p));
        std::vector<double> e;
        for (const auto& row : r.rows) e.push_back(row.e);
        ok = ok && r.monotone && lp.pass;
        d += type + " " + list(e) + " floor " + num(r.floor) + "; ";
    };
    sweep(line(128), "identity");
    sweep(line(128), "isotropic-separable");
    sweep(square(32), "diagonal-crystal");

    const Grid g = Grid::build(square(8));
    const double a = 1.7, b = 0.45;
    AnisotropyKernel k(g);
    for (std::size_t x = 0; x < g.size(); ++x)
        for (std::size_t y = 0; y < g.size(); ++y) {
            k.at(x, y)[0] = a;
            k.at(x, y)[3] = b;
        }
    const MatrixField ap = limit_matrix(k);
    double spot = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x)
        spot = std::max({spot, std::abs(ap.at(x, 0, 0) - (3 * a + b) / 4), std::abs(ap.at(x, 1, 1) - (a + 3 * b) / 4),
                         std::abs(ap.at(x, 0, 1)), std::abs(ap.at(x, 1, 0))});
    ok = ok && spot <= 1e-14;
    return {ok, d + "A' spot check " + num(spot)};
}

ExperimentConfig config_for(const GridConfig& gc, const std::string& type) {
    ExperimentConfig c;
    c.grid = gc;
    c.kernel = preset(type);
    c.seed = 5;
    c.kernel.seed = 5;
    c.trials = 3;
    return c;
}

Outcome determinism() {
    struct Run {
        ExperimentConfig c;
        std::string suite;
    };
    std::vector<Run> runs;
    for (const char* s : {"identities", "decompose", "solve", "dn", "alessandrini", "runge", "uniqueness", "limit"})
        runs.push_back({config_for(line(64), "rank-R-random"), s});
    runs.push_back({config_for(square(16), "diagonal-crystal"), "identities"});
    runs.push_back({config_for(square(16), "diagonal-crystal"), "dn"});
    int same = 0;
    for (const auto& r : runs) {
        std::vector<std::string> texts;
        for (int threads : {1, 1, 4, 4}) {
            set_num_threads(threads);
            texts.push_back(dump_json(run_suite(r.suite, r.c, RunOptions{}).report));
        }
        same += std::all_of(texts.begin(), texts.end(), [&](const std::string& t) { return t == texts[0]; }) ? 1 : 0;
    }
    set_num_threads(1);
    return {same == static_cast<int>(runs.size()),
            std::to_string(same) + "/" + std::to_string(runs.size()) + " suites byte-identical over two runs at 1 and 4 threads"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"adjointness", adjointness},   {"composition", composition}, {"gauge", gauge},
        {"mercer", mercer},             {"reduction", reduction},     {"wellposedness", wellposed},
        {"dn_symmetry", dn_symmetry},   {"alessandrini", alessandrini}, {"uniqueness", uniqueness},
        {"limit", limit},               {"determinism", determinism}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  %2zu %-14s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
