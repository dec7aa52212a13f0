#include "afc/config.hpp"

#include "afc/error.hpp"

#include <filesystem>
#include <set>

namespace afc {

namespace {

void allow_keys(const json& j, const std::string& where, const std::set<std::string>& keys) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return j.get<int>();
}

std::uint64_t get_seed(const json& j, const std::string& where) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    throw ConfigError(where + ": expected a nonnegative integer");
}

std::vector<double> per_axis(const json& j, int dim, const std::string& where) {
    if (j.is_number()) return std::vector<double>(static_cast<std::size_t>(dim), j.get<double>());
    if (!j.is_array() || j.size() != static_cast<std::size_t>(dim)) throw ConfigError(where + ": expected a number or one value per axis");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(get_number(v, where));
    return out;
}

std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(get_number(v, where));
    return out;
}

GridConfig parse_grid(const json& j) {
    allow_keys(j, "grid", {"dim", "L", "N", "omega_min", "omega_max", "w1_min", "w1_max", "w2_min", "w2_max"});
    for (const char* k : {"dim", "N", "omega_min", "omega_max", "w1_min", "w1_max", "w2_min", "w2_max"})
        if (!j.contains(k)) throw ConfigError(std::string("grid: missing key '") + k + "'");
    GridConfig g;
    g.dim = get_int(j["dim"], "grid.dim");
    if (g.dim != 1 && g.dim != 2) throw ConfigError("grid.dim must be 1 or 2");
    if (j.contains("L")) g.L = get_number(j["L"], "grid.L");
    g.N = get_int(j["N"], "grid.N");
    g.omega = {per_axis(j["omega_min"], g.dim, "grid.omega_min"), per_axis(j["omega_max"], g.dim, "grid.omega_max")};
    g.w1 = {per_axis(j["w1_min"], g.dim, "grid.w1_min"), per_axis(j["w1_max"], g.dim, "grid.w1_max")};
    g.w2 = {per_axis(j["w2_min"], g.dim, "grid.w2_min"), per_axis(j["w2_max"], g.dim, "grid.w2_max")};
    return g;
}

PresetSpec parse_kernel(const json& j, const std::string& base_dir) {
    allow_keys(j, "kernel", {"type", "amplitude", "fraction", "beta", "phi", "rank", "seed", "shift", "matrix", "manifest"});
    if (!j.contains("type") || !j["type"].is_string()) throw ConfigError("kernel: missing string key 'type'");
    PresetSpec p;
    p.type = j["type"].get<std::string>();
    static const std::set<std::string> types{"identity", "isotropic-separable", "diagonal-crystal", "rank-R-random", "constant", "phi-files"};
    if (!types.count(p.type)) throw ConfigError("kernel: unknown type '" + p.type + "'");
    if (j.contains("amplitude")) p.amplitude = get_number(j["amplitude"], "kernel.amplitude");
    if (j.contains("fraction")) p.fraction = get_number(j["fraction"], "kernel.fraction");
    if (j.contains("beta")) p.beta = number_list(j["beta"], "kernel.beta");
    if (j.contains("phi")) p.phi = number_list(j["phi"], "kernel.phi");
    if (j.contains("rank")) p.rank = get_int(j["rank"], "kernel.rank");
    if (j.contains("seed")) {
        p.seed = get_seed(j["seed"], "kernel.seed");
    }
    if (j.contains("shift")) p.shift = get_number(j["shift"], "kernel.shift");
    if (j.contains("matrix")) p.matrix = number_list(j["matrix"], "kernel.matrix");
    if (j.contains("manifest")) {
        if (!j["manifest"].is_string()) throw ConfigError("kernel.manifest: expected a string");
        const std::filesystem::path m(j["manifest"].get<std::string>());
        p.manifest = m.is_absolute() ? m.string() : (std::filesystem::path(base_dir) / m).string();
    }
    if (p.type == "phi-files" && p.manifest.empty()) throw ConfigError("kernel: phi-files needs 'manifest'");
    return p;
}

void parse_tolerances(const json& j, Tolerances& t) {
    const std::vector<std::pair<const char*, double*>> slots{
        {"adjointness", &t.adjointness},   {"gauge", &t.gauge},
        {"self_adjoint", &t.self_adjoint}, {"kernel_split", &t.kernel_split},
        {"mercer", &t.mercer},             {"mercer_roundtrip", &t.mercer_roundtrip},
        {"trace", &t.trace},               {"solve_residual", &t.solve_residual},
        {"zero_solve", &t.zero_solve},     {"transformed_residual", &t.transformed_residual},
        {"dn_symmetry", &t.dn_symmetry},   {"alessandrini", &t.alessandrini},
        {"control", &t.control},           {"distinguish", &t.distinguish},
        {"runge", &t.runge}};
    std::set<std::string> keys;
    for (const auto& [k, p] : slots) keys.insert(k);
    allow_keys(j, "tolerances", keys);
    for (const auto& [k, p] : slots)
        if (j.contains(k)) *p = get_number(j[k], std::string("tolerances.") + k);
}

}  // namespace

ExperimentConfig parse_config(const json& j, const std::string& base_dir) {
    allow_keys(j, "config", {"grid", "kernel", "nu", "s", "s_list", "rho", "windows", "runge", "limit", "tolerances", "pad", "seed",
                             "trials", "output"});
    if (!j.contains("grid")) throw ConfigError("config: missing 'grid'");
    ExperimentConfig c;
    c.grid = parse_grid(j["grid"]);
    if (j.contains("kernel")) {
        c.kernel = parse_kernel(j["kernel"], base_dir);
        c.kernel_seed_set = j["kernel"].contains("seed");
    }
    if (j.contains("nu")) c.nu = get_number(j["nu"], "nu");
    if (j.contains("s")) {
        c.s = get_number(j["s"], "s");
        if (!(c.s > 0.0 && c.s < 1.0)) throw ConfigError("s must lie in (0, 1)");
    }
    if (j.contains("s_list")) {
        c.s_list = number_list(j["s_list"], "s_list");
        for (std::size_t i = 0; i < c.s_list.size(); ++i) {
            if (!(c.s_list[i] > 0.0 && c.s_list[i] < 1.0)) throw ConfigError("s_list: values must lie in (0, 1)");
            if (i > 0 && !(c.s_list[i] > c.s_list[i - 1])) throw ConfigError("s_list: values must increase");
        }
    }
    if (j.contains("rho")) {
        allow_keys(j["rho"], "rho", {"amplitude", "fraction"});
        if (j["rho"].contains("amplitude")) c.rho.amplitude = get_number(j["rho"]["amplitude"], "rho.amplitude");
        if (j["rho"].contains("fraction")) c.rho.fraction = get_number(j["rho"]["fraction"], "rho.fraction");
        if (!(c.rho.fraction > 0.0 && c.rho.fraction <= 1.0)) throw ConfigError("rho.fraction must lie in (0, 1]");
        if (!(c.rho.amplitude > -1.0)) throw ConfigError("rho.amplitude must exceed -1");
    }
    if (j.contains("windows")) {
        allow_keys(j["windows"], "windows", {"m1", "m2"});
        if (j["windows"].contains("m1")) c.m1 = get_int(j["windows"]["m1"], "windows.m1");
        if (j["windows"].contains("m2")) c.m2 = get_int(j["windows"]["m2"], "windows.m2");
        if (c.m1 < 1 || c.m2 < 1) throw ConfigError("windows: basis sizes must be positive");
    }
    if (j.contains("runge")) {
        allow_keys(j["runge"], "runge", {"target_fraction"});
        if (j["runge"].contains("target_fraction")) c.runge_target_fraction = get_number(j["runge"]["target_fraction"], "runge.target_fraction");
    }
    if (j.contains("limit")) {
        allow_keys(j["limit"], "limit", {"tests"});
        if (j["limit"].contains("tests")) c.limit_tests = get_int(j["limit"]["tests"], "limit.tests");
        if (c.limit_tests < 1) throw ConfigError("limit.tests must be positive");
    }
    if (j.contains("tolerances")) parse_tolerances(j["tolerances"], c.tol);
    if (j.contains("pad")) {
        c.pad = get_int(j["pad"], "pad");
        if (c.pad < 1 || c.pad > 64) throw ConfigError("pad must lie in [1, 64]");
    }
    if (j.contains("seed")) {
        c.seed = get_seed(j["seed"], "seed");
    }
    if (!c.kernel_seed_set) c.kernel.seed = c.seed;
    if (j.contains("trials")) {
        c.trials = get_int(j["trials"], "trials");
        if (c.trials < 1) throw ConfigError("trials must be positive");
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) throw ConfigError("output: expected a string");
        c.output = j["output"].get<std::string>();
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    json j;
    try {
        j = read_json(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path().string());
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["grid"] = {{"dim", c.grid.dim},           {"L", c.grid.L},
                 {"N", c.grid.N},               {"omega_min", c.grid.omega.lo},
                 {"omega_max", c.grid.omega.hi}, {"w1_min", c.grid.w1.lo},
                 {"w1_max", c.grid.w1.hi},       {"w2_min", c.grid.w2.lo},
                 {"w2_max", c.grid.w2.hi}};
    json k;
    k["type"] = c.kernel.type;
    k["amplitude"] = c.kernel.amplitude;
    k["fraction"] = c.kernel.fraction;
    k["beta"] = c.kernel.beta;
    k["phi"] = c.kernel.phi;
    k["rank"] = c.kernel.rank;
    k["seed"] = c.kernel.seed;
    k["shift"] = c.kernel.shift;
    if (!c.kernel.matrix.empty()) k["matrix"] = c.kernel.matrix;
    if (!c.kernel.manifest.empty()) k["manifest"] = c.kernel.manifest;
    j["kernel"] = k;
    if (c.nu) j["nu"] = *c.nu;
    j["s"] = c.s;
    j["s_list"] = c.s_list;
    j["rho"] = {{"amplitude", c.rho.amplitude}, {"fraction", c.rho.fraction}};
    j["windows"] = {{"m1", c.m1}, {"m2", c.m2}};
    j["runge"] = {{"target_fraction", c.runge_target_fraction}};
    j["limit"] = {{"tests", c.limit_tests}};
    j["pad"] = c.pad;
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    return j;
}

void set_seed(ExperimentConfig& c, std::uint64_t seed) {
    c.seed = seed;
    if (!c.kernel_seed_set) c.kernel.seed = seed;
}

ExperimentConfig refined(const ExperimentConfig& c, int k) {
    ExperimentConfig r = c;
    r.grid.N = c.grid.N << k;
    return r;
}

Field rho_field(const Grid& g, const RhoSpec& r) { return r.amplitude * omega_bump(g, r.fraction); }

}  // namespace afc
