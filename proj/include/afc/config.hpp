#pragma once

#include "afc/grid.hpp"
#include "afc/io.hpp"
#include "afc/presets.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace afc {

struct Tolerances {
    double adjointness = 1e-12;
    double gauge = 1e-12;
    double self_adjoint = 1e-12;
    double kernel_split = 1e-6;
    double mercer = 1e-10;
    double mercer_roundtrip = 1e-9;
    double trace = 1e-8;
    double solve_residual = 1e-10;
    double zero_solve = 1e-12;
    double transformed_residual = 1e-9;
    double dn_symmetry = 1e-10;
    double alessandrini = 1e-2;
    double control = 1e-10;
    double distinguish = 10.0;
    double runge = 0.05;
};

/// rho = amplitude * bump in omega with radius fraction * (smallest half-width of omega).
struct RhoSpec {
    double amplitude = 0.3;
    double fraction = 0.9;
};

struct ExperimentConfig {
    GridConfig grid;
    PresetSpec kernel;
    std::optional<double> nu;  ///< claimed (A2) constant; defaults to the preset's guaranteed bound
    double s = 0.45;
    std::vector<double> s_list{0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
    RhoSpec rho;
    int m1 = 16;
    int m2 = 16;
    double runge_target_fraction = 0.9;
    int limit_tests = 6;
    Tolerances tol;
    int pad = 8;
    std::uint64_t seed = 1;
    bool kernel_seed_set = false;  ///< kernel.seed given explicitly; otherwise it follows seed
    int trials = 20;
    std::string output;
};

/// Parse a JSON config; unknown keys and ill-typed values raise ConfigError.
/// base_dir resolves relative manifest paths.
ExperimentConfig parse_config(const json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Round-trip representation, used to echo the effective config into reports.
json config_to_json(const ExperimentConfig& c);

/// Replace the global seed; the kernel seed follows unless set explicitly.
void set_seed(ExperimentConfig& c, std::uint64_t seed);

/// Same config with N multiplied by 2^k.
ExperimentConfig refined(const ExperimentConfig& c, int k);

Field rho_field(const Grid& g, const RhoSpec& r);

}  // namespace afc
