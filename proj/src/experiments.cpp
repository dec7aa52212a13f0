#include "afc/experiments.hpp"

#include "afc/conductivity.hpp"
#include "afc/error.hpp"
#include "afc/inverse.hpp"
#include "afc/limit.hpp"
#include "afc/nonlocal.hpp"
#include "afc/solver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <Eigen/SVD>

namespace afc {

namespace fs = std::filesystem;

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

namespace {

Grid make_grid(const GridConfig& gc) {
    try {
        return Grid::build(gc);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

PhiSequence make_phi(const Grid& g, const PresetSpec& spec) {
    try {
        return build_preset(g, spec);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

double claimed_nu(const ExperimentConfig& c, const Grid& g) { return c.nu ? *c.nu : preset_nu(g, c.kernel); }

json header(const std::string& name, const ExperimentConfig& c, const Grid& g) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = name;
    j["config"] = config_to_json(c);
    j["grid_hash"] = g.hash();
    return j;
}

std::string artifact(const RunOptions& o, const std::string& name) { return (fs::path(o.out_dir) / name).string(); }

std::vector<ExperimentConfig> levels(const ExperimentConfig& c, const RunOptions& o) {
    std::vector<ExperimentConfig> out;
    for (int k = 0; k <= o.refine; ++k) out.push_back(refined(c, k));
    return out;
}

std::string fmt(double v) {
    const std::string t = dump_json(v);
    return t.substr(0, t.size() - 1);
}

}  // namespace

Field gaussian(const Grid& g, double sigma) {
    std::array<double, 2> c{0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        c[ua] = 0.5 * (g.config().omega.lo[ua] + g.config().omega.hi[ua]);
    }
    const int d = g.dim();
    return g.sample([&](const double* x) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += (x[a] - c[static_cast<std::size_t>(a)]) * (x[a] - c[static_cast<std::size_t>(a)]);
        return std::exp(-0.5 * r2 / (sigma * sigma));
    });
}

namespace {

double interior_rel(const Grid& g, const Field& a, const Field& b) {
    const double n = l2_norm_interior(g, b);
    return n > 0.0 ? l2_norm_interior(g, a - b) / n : l2_norm_interior(g, a - b);
}

}  // namespace

double composition_error(const Grid& g, double s, int pad) {
    const Field u = gaussian(g, 0.35);
    return interior_rel(g, frac_laplacian_pair(g, u, s), frac_laplacian_spectral(g, u, s, pad));
}

SuiteResult run_identities(const ExperimentConfig& c, const RunOptions& o) {
    const Grid g = make_grid(c.grid);
    const PhiSequence phi = make_phi(g, c.kernel);
    SuiteResult res;
    res.report = header("identities", c, g);
    json& suites = res.report["suites"];
    bool pass = true;

    {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        double worst = 0.0;
        for (int t = 0; t < c.trials; ++t) {
            const double s = 0.5 + 0.4 * unit(rng);
            const Field u = random_smooth_field(g, c.seed + 7919 * static_cast<std::uint64_t>(t + 1));
            PairField V(g, PairShape::Vector);
            for (std::size_t x = 0; x < g.size(); ++x)
                for (std::size_t y = 0; y < g.size(); ++y)
                    for (int k = 0; k < g.dim(); ++k) V.at(x, y)[k] = x == y ? 0.0 : unit(rng);
            const PairField gu = frac_gradient(g, u, s);
            const double lhs = pair_inner(g, V, gu);
            const double rhs = inner(g, frac_divergence(g, V, s), u);
            const double scale = std::sqrt(pair_inner(g, V, V) * pair_inner(g, gu, gu));
            worst = std::max(worst, scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs));
        }
        double anti = 0.0, swap = 0.0;
        const ZetaKernel zeta(g.dim(), c.s);
        const Field u = random_smooth_field(g, c.seed);
        const PairField gu = frac_gradient(g, u, c.s);
        for (std::size_t x = 0; x < g.size(); ++x) {
            for (std::size_t y = 0; y < g.size(); ++y) {
                double a[2], b[2];
                zeta.eval(g.point(x).data(), g.point(y).data(), a);
                zeta.eval(g.point(y).data(), g.point(x).data(), b);
                for (int k = 0; k < g.dim(); ++k) {
                    anti = std::max(anti, std::abs(a[k] + b[k]));
                    swap = std::max(swap, std::abs(gu.at(x, y)[k] - gu.at(y, x)[k]));
                }
            }
        }
        const bool ok = worst <= c.tol.adjointness && anti == 0.0 && swap == 0.0;
        suites["adjointness"] = {{"trials", c.trials}, {"max_residual", worst}, {"tolerance", c.tol.adjointness},
                                 {"zeta_antisymmetry", anti}, {"swap_symmetry", swap}, {"pass", ok}};
        pass = pass && ok;
    }

    {
        json curve = json::array();
        std::vector<double> errs;
        for (const auto& lc : levels(c, o)) {
            const Grid lg = make_grid(lc.grid);
            const double e = composition_error(lg, c.s, c.pad);
            errs.push_back(e);
            curve.push_back({{"N", lc.grid.N}, {"error", e}});
        }
        const bool ok = errs.size() < 2 || strictly_decreasing(errs);
        suites["composition"] = {{"s", c.s}, {"refinement_curve", curve}, {"monotone", strictly_decreasing(errs)}, {"pass", ok}};
        pass = pass && ok;
    }

    {
        const AnisotropyKernel rk = random_kernel(g, c.seed);
        const Symmetrization sy = symmetrize(rk);
        const double r = gauge_invariance_residual(g, rk, c.s, c.trials, c.seed);
        const double ratio = std::sqrt(std::inner_product(sy.a.data.begin(), sy.a.data.end(), sy.a.data.begin(), 0.0) /
                                       std::inner_product(sy.s.data.begin(), sy.s.data.end(), sy.s.data.begin(), 0.0));
        const bool ok = r <= c.tol.gauge;
        suites["gauge_invariance"] = {{"trials", c.trials}, {"max_residual", r}, {"antisymmetric_to_symmetric_norm", ratio},
                                      {"tolerance", c.tol.gauge}, {"pass", ok}};
        pass = pass && ok;
    }

    {
        const double r_random = self_adjointness_residual(g, random_kernel(g, c.seed + 1), c.s, c.trials, c.seed);
        const double r_preset = self_adjointness_residual(g, kernel_from_phi(g, phi), c.s, c.trials, c.seed);
        const bool ok = r_random <= c.tol.self_adjoint && r_preset <= c.tol.self_adjoint;
        suites["self_adjointness"] = {{"random_kernel", r_random}, {"preset_kernel", r_preset}, {"tolerance", c.tol.self_adjoint},
                                      {"pass", ok}};
        pass = pass && ok;
    }

    {
        const std::array<double, 2> x{0.0, 0.0};
        const std::array<double, 2> y = g.dim() == 1 ? std::array<double, 2>{0.5, 0.0} : std::array<double, 2>{1.0, 0.0};
        const KernelSplitResult r = kernel_split_residual(g.dim(), x, y, c.s, 1e-4);
        json k = {{"s", c.s}, {"applicable", r.applicable}};
        bool ok = true;
        if (r.applicable) {
            const double r1 = kernel_split_residual(g.dim(), x, y, c.s, 1e-2).residual;
            const double r2 = kernel_split_residual(g.dim(), x, y, c.s, 5e-3).residual;
            const double r3 = kernel_split_residual(g.dim(), x, y, c.s, 2.5e-3).residual;
            const double order1 = std::log2(r1 / r2), order2 = std::log2(r2 / r3);
            ok = r.residual <= c.tol.kernel_split && std::abs(order1 - 2.0) < 0.2 && std::abs(order2 - 2.0) < 0.2;
            k["residual"] = r.residual;
            k["richardson_orders"] = {order1, order2};
            k["tolerance"] = c.tol.kernel_split;
        } else {
            k["status"] = "not applicable (n + 2s = 2)";
        }
        k["pass"] = ok;
        suites["kernel_split"] = k;
        pass = pass && ok;
    }

    {
        const double nu = claimed_nu(c, g);
        const PositivityReport p = check_positivity(symmetrize(kernel_from_phi(g, phi)).s, nu);
        suites["positivity"] = {{"nu", nu}, {"min_rayleigh", p.min_rayleigh}, {"pass", p.pass}};
        pass = pass && p.pass;
    }

    res.pass = pass;
    res.report["pass"] = pass;
    return res;
}

SuiteResult run_decompose(const ExperimentConfig& c, const RunOptions& o) {
    const Grid g = make_grid(c.grid);
    const PhiSequence phi = make_phi(g, c.kernel);
    SuiteResult res;
    res.report = header("decompose", c, g);
    const AnisotropyKernel as = kernel_from_phi(g, phi);
    const auto betas = phi.betas();
    const AnisotropyKernel at = assemble_exterior(g, betas);
    MercerOptions mo;
    mo.tol = c.tol.mercer;
    const MercerResult mr = mercer_decompose(g, as, at, mo);

    json entries = json::array();
    double trace_worst = 0.0;
    for (const auto& e : mr.entries) {
        const double tr = e.trace_quadrature;
        const double rel = tr != 0.0 ? std::abs(e.trace_spectrum - tr) / std::abs(tr) : std::abs(e.trace_spectrum);
        trace_worst = std::max(trace_worst, rel);
        entries.push_back({{"i", e.i}, {"j", e.j}, {"retained", e.eigenvalues.size()}, {"negatives", e.negatives},
                           {"lambda_max", e.lambda_max}, {"trace_quadrature", tr}, {"trace_spectrum", e.trace_spectrum},
                           {"trace_relative", rel}, {"reconstruction_residual", e.reconstruction_residual}});
    }

    const PhiSequence rt = interleave(betas, mr.phis, g.size(), g.dim());
    const AnisotropyKernel back = kernel_from_phi(g, rt);
    double num = 0.0, den = 0.0;
    for (auto x : g.interior_nodes())
        for (auto y : g.interior_nodes())
            for (int k = 0; k < g.dim() * g.dim(); ++k) {
                const double d = back.at(x, y)[k] - as.at(x, y)[k];
                num += d * d;
                den += as.at(x, y)[k] * as.at(x, y)[k];
            }
    const double roundtrip = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    const double nu = claimed_nu(c, g);
    const PositivityReport pos = check_positivity(back, nu);

    const bool ok = mr.max_residual <= c.tol.mercer && mr.negatives == 0 && trace_worst <= c.tol.trace &&
                    roundtrip <= c.tol.mercer_roundtrip;
    res.report["entries"] = entries;
    res.report["phi_count"] = mr.phis.size();
    res.report["max_reconstruction_residual"] = mr.max_residual;
    res.report["max_trace_relative"] = trace_worst;
    res.report["roundtrip_residual"] = roundtrip;
    res.report["truncated_positivity"] = {{"nu", nu}, {"min_rayleigh", pos.min_rayleigh}, {"pass", pos.pass}};
    res.report["tolerances"] = {{"mercer", c.tol.mercer}, {"trace", c.tol.trace}, {"roundtrip", c.tol.mercer_roundtrip}};
    res.pass = ok;
    res.report["pass"] = ok;
    if (!o.out_dir.empty()) write_phi_manifest(artifact(o, "phi"), g, rt);
    return res;
}

namespace {

struct SolveLevel {
    json report;
    bool pass = false;
    double consistency = 0.0;
};

SolveLevel solve_level(const ExperimentConfig& c, const Grid& g, const RunOptions* o) {
    SolveLevel out;
    const PhiSequence phi = make_phi(g, c.kernel);
    const AnisotropyKernel a = kernel_from_phi(g, phi);
    const double nu = claimed_nu(c, g);
    const PositivityReport pos = check_positivity(a, nu);
    const Eigen::MatrixXd M = assemble_bilinear(g, a, c.s).M;
    const WellposednessReport wp = wellposedness_report(g, M);
    out.report["N"] = g.n();
    out.report["positivity"] = {{"nu", nu}, {"min_rayleigh", pos.min_rayleigh}, {"pass", pos.pass}};
    out.report["wellposedness"] = {{"coercivity", wp.coercivity}, {"continuity", wp.continuity},
                                   {"condition_number", wp.condition}, {"indefinite", wp.indefinite}};
    if (wp.indefinite) {
        out.report["error"] = "interior stiffness block is not positive definite";
        return out;
    }
    const DirichletSolver solver(g, M);
    const auto P = static_cast<Eigen::Index>(g.size());
    const Solution zero = solver.solve({Field::Zero(P), Field::Zero(P)});
    const double zero_norm = l2_norm(g, zero.u);

    const Field f = window_bump(g, 1, 0.9);
    const Solution sol = solver.solve({f, Field::Zero(P)});

    const TransformedPotential q = build_Q(g, phi, c.s, c.pad);
    const Sequence gext = reduce(f, phi);
    TransformedSolution ts, tp;
    try {
        ts = solve_transformed(g, phi, q, gext, Field(), TransformedPath::Spectral);
        tp = solve_transformed(g, phi, q, gext, Field(), TransformedPath::Pair);
    } catch (const Error& e) {
        out.report["zero_data_norm"] = zero_norm;
        out.report["direct"] = {{"energy", sol.energy}, {"weak_residual", sol.residual}, {"stability_constant", sol.stability}};
        out.report["error"] = e.what();
        return out;
    }
    out.consistency = l2_norm(g, ts.u - sol.u) / l2_norm(g, sol.u);
    const double pair_gap = l2_norm(g, tp.u - sol.u) / l2_norm(g, sol.u);

    out.report["zero_data_norm"] = zero_norm;
    out.report["direct"] = {{"energy", sol.energy}, {"weak_residual", sol.residual}, {"stability_constant", sol.stability}};
    out.report["transformed"] = {{"spectral_weak_residual", ts.residual}, {"pair_weak_residual", tp.residual},
                                 {"projection_residual", ts.projection}, {"spectral_vs_direct", out.consistency},
                                 {"pair_vs_direct", pair_gap}};
    out.pass = pos.pass && zero_norm <= c.tol.zero_solve && sol.residual <= c.tol.solve_residual &&
               ts.residual <= c.tol.transformed_residual && tp.residual <= c.tol.transformed_residual &&
               pair_gap <= c.tol.transformed_residual;
    if (o && !o->out_dir.empty()) {
        write_field_csv(artifact(*o, "solution.csv"), g, sol.u);
        write_field_csv(artifact(*o, "solution_transformed.csv"), g, ts.u);
        write_json(artifact(*o, "solution.json"), field_metadata(g, "u"));
    }
    return out;
}

}  // namespace

SuiteResult run_solve(const ExperimentConfig& c, const RunOptions& o) {
    const Grid g0 = make_grid(c.grid);
    SuiteResult res;
    res.report = header("solve", c, g0);
    json lv = json::array();
    std::vector<double> cons;
    bool pass = true;
    int k = 0;
    for (const auto& lc : levels(c, o)) {
        const Grid g = make_grid(lc.grid);
        SolveLevel s = solve_level(lc, g, k == 0 ? &o : nullptr);
        pass = pass && s.pass;
        cons.push_back(s.consistency);
        lv.push_back(s.report);
        ++k;
    }
    res.report["levels"] = lv;
    res.report["two_path_monotone"] = strictly_decreasing(cons);
    if (cons.size() >= 2) pass = pass && strictly_decreasing(cons);
    res.pass = pass;
    res.report["pass"] = pass;
    return res;
}

SuiteResult run_dn(const ExperimentConfig& c, const RunOptions& o) {
    const Grid g = make_grid(c.grid);
    const PhiSequence phi = make_phi(g, c.kernel);
    const AnisotropyKernel a = kernel_from_phi(g, phi);
    SuiteResult res;
    res.report = header("dn", c, g);
    const DirichletSolver solver(g, assemble_bilinear(g, a, c.s).M);
    const DNMatrix full = dn_full(solver, a.hash(), c.s);
    const double sym = dn_symmetry_residual(full);
    const DNMatrix win = dn_map(solver, hat_basis(g, 1, c.m1), hat_basis(g, 2, c.m2), a.hash(), c.s);
    const double sigma = win.values.size() ? Eigen::JacobiSVD<Eigen::MatrixXd>(win.values).singularValues()(0) : 0.0;
    res.report["full_size"] = full.values.rows();
    res.report["symmetry_residual"] = sym;
    res.report["tolerance"] = c.tol.dn_symmetry;
    res.report["window_block"] = {{"rows", win.values.rows()}, {"cols", win.values.cols()}, {"sigma_max", sigma}};
    res.pass = sym <= c.tol.dn_symmetry;
    res.report["pass"] = res.pass;
    if (!o.out_dir.empty()) {
        const json h = {{"kernel_hash", a.hash()}, {"s", c.s}, {"grid_hash", g.hash()}};
        write_matrix_dump(artifact(o, "dn_full.bin"), full.values, h);
        write_matrix_dump(artifact(o, "dn_w1_w2.bin"), win.values, h);
    }
    return res;
}

SuiteResult run_alessandrini(const ExperimentConfig& c, const RunOptions& o) {
    const Grid g0 = make_grid(c.grid);
    SuiteResult res;
    res.report = header("alessandrini", c, g0);
    json lv = json::array();
    std::vector<double> resid;
    bool pass = true;
    int k = 0;
    for (const auto& lc : levels(c, o)) {
        const Grid g = make_grid(lc.grid);
        const PhiSequence phi1 = make_phi(g, c.kernel);
        const PhiSequence phi2 = apply_gauge(g, phi1, rho_field(g, c.rho));
        const Field f1 = window_bump(g, 1, 0.9), f2 = window_bump(g, 2, 0.9);
        const AlessandriniReport r = alessandrini_check(g, phi1, phi2, c.s, f1, f2, c.pad);
        json e = {{"N", lc.grid.N}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"energy_scale", r.energy_scale}, {"residual", r.residual}};
        if (k == 0) {
            const AlessandriniReport sw = alessandrini_check(g, phi1, phi2, c.s, f2, f1, c.pad);
            e["swap"] = {{"lhs", sw.lhs}, {"rhs", sw.rhs}, {"residual", sw.residual},
                         {"lhs_asymmetry", std::abs(sw.lhs - r.lhs) / std::max(std::abs(r.lhs), 1e-300)}};
            pass = pass && r.residual <= c.tol.alessandrini;
        }
        resid.push_back(r.residual);
        lv.push_back(e);
        ++k;
    }
    res.report["levels"] = lv;
    res.report["tolerance"] = c.tol.alessandrini;
    res.report["monotone"] = strictly_decreasing(resid);
    if (resid.size() >= 2) pass = pass && strictly_decreasing(resid);
    res.pass = pass;
    res.report["pass"] = pass;
    return res;
}

SuiteResult run_runge(const ExperimentConfig& c, const RunOptions& o) {
    const Grid g = make_grid(c.grid);
    const PhiSequence phi = make_phi(g, c.kernel);
    SuiteResult res;
    res.report = header("runge", c, g);
    const DirichletSolver solver(g, assemble_bilinear(g, kernel_from_phi(g, phi), c.s).M);
    const RungeReport r = runge_residual(solver, phi, omega_bump(g, c.runge_target_fraction), hat_basis(g, 1, c.m1));
    bool nonincreasing = true;
    for (std::size_t i = 1; i < r.curve.size(); ++i)
        if (r.curve[i] > r.curve[i - 1]) nonincreasing = false;
    res.report["curve"] = r.curve;
    res.report["a4"] = r.a4;
    res.report["label"] = r.label;
    res.report["nonincreasing"] = nonincreasing;
    res.report["final_residual"] = r.curve.empty() ? 1.0 : r.curve.back();
    res.report["tolerance"] = c.tol.runge;
    res.pass = nonincreasing && (!r.a4 || (!r.curve.empty() && r.curve.back() <= c.tol.runge));
    res.report["pass"] = res.pass;
    if (!o.out_dir.empty()) {
        std::string csv = "m,residual\n";
        for (std::size_t i = 0; i < r.curve.size(); ++i) csv += std::to_string(i + 1) + "," + fmt(r.curve[i]) + "\n";
        write_text(artifact(o, "runge.csv"), csv);
    }
    return res;
}

SuiteResult run_uniqueness(const ExperimentConfig& c, const RunOptions& o) {
    const Grid g = make_grid(c.grid);
    const PhiSequence phi = make_phi(g, c.kernel);
    SuiteResult res;
    res.report = header("uniqueness", c, g);
    const Field rho = rho_field(g, c.rho);
    const UniquenessReport u = uniqueness_experiment(g, phi, rho, c.s, c.m1, c.m2);
    const UniquenessReport half = uniqueness_experiment(g, phi, 0.5 * rho, c.s, c.m1, c.m2);
    res.report["delta_dn"] = u.delta_dn;
    res.report["delta_kernel"] = u.delta_kernel;
    res.report["control_delta_dn"] = u.control;
    res.report["floor"] = u.floor;
    res.report["ratio_to_floor"] = u.ratio;
    res.report["control_pass"] = u.control_pass;
    res.report["distinguish_pass"] = u.distinguish_pass;
    res.report["half_rho"] = {{"delta_dn", half.delta_dn}, {"delta_kernel", half.delta_kernel}, {"decreased", half.delta_dn < u.delta_dn}};
    res.pass = u.control_pass && u.distinguish_pass;
    (void)o;
    res.report["pass"] = res.pass;
    return res;
}

SuiteResult run_limit(const ExperimentConfig& c, const RunOptions& o) {
    const Grid g = make_grid(c.grid);
    const PhiSequence phi = make_phi(g, c.kernel);
    SuiteResult res;
    res.report = header("limit", c, g);
    const AnisotropyKernel a = kernel_from_phi(g, phi);
    const double nu = claimed_nu(c, g);
    const LimitPositivity lp = check_limit_matrix(limit_matrix(a), nu);
    const SweepResult sw = s_sweep(g, phi, omega_bump(g, 0.9), c.s_list, limit_test_basis(g, c.limit_tests, c.seed + 1000), c.pad);
    json rows = json::array();
    for (const auto& r : sw.rows) rows.push_back({{"s", r.s}, {"e", r.e}, {"e_pair", r.e_pair}});
    res.report["rows"] = rows;
    res.report["floor"] = sw.floor;
    res.report["floor_strong_vs_weak"] = sw.floor_strong;
    res.report["floor_reduction_at_s1"] = sw.floor_s1;
    res.report["monotone"] = sw.monotone;
    res.report["limit_matrix"] = {{"nu", nu}, {"min_eigenvalue", lp.min_eigenvalue}, {"max_asymmetry", lp.max_asymmetry}, {"pass", lp.pass}};
    res.pass = sw.monotone && lp.pass;
    res.report["pass"] = res.pass;
    if (!o.out_dir.empty()) {
        std::string csv = "s,e,floor\n";
        for (const auto& r : sw.rows) csv += fmt(r.s) + "," + fmt(r.e) + "," + fmt(sw.floor) + "\n";
        csv += "floor," + fmt(sw.floor) + "," + fmt(sw.floor) + "\n";
        write_text(artifact(o, "limit.csv"), csv);
    }
    return res;
}

SuiteResult run_suite(const std::string& name, const ExperimentConfig& c, const RunOptions& o) {
    if (name == "identities") return run_identities(c, o);
    if (name == "decompose") return run_decompose(c, o);
    if (name == "solve") return run_solve(c, o);
    if (name == "dn") return run_dn(c, o);
    if (name == "alessandrini") return run_alessandrini(c, o);
    if (name == "runge") return run_runge(c, o);
    if (name == "uniqueness") return run_uniqueness(c, o);
    if (name == "limit") return run_limit(c, o);
    throw ConfigError("unknown command '" + name + "'");
}

}  // namespace afc
