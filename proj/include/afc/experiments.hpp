#pragma once

#include "afc/config.hpp"

#include <string>

namespace afc {

inline constexpr int kSchemaVersion = 1;

struct SuiteResult {
    json report;
    bool pass = false;
};

/// Options shared by every suite. out_dir empty means no artifacts besides the report.
struct RunOptions {
    std::string out_dir;
    int refine = 0;  ///< extra runs at 2N, 4N, ... for refinement curves
};

SuiteResult run_identities(const ExperimentConfig& c, const RunOptions& o);
SuiteResult run_decompose(const ExperimentConfig& c, const RunOptions& o);
SuiteResult run_solve(const ExperimentConfig& c, const RunOptions& o);
SuiteResult run_dn(const ExperimentConfig& c, const RunOptions& o);
SuiteResult run_alessandrini(const ExperimentConfig& c, const RunOptions& o);
SuiteResult run_runge(const ExperimentConfig& c, const RunOptions& o);
SuiteResult run_uniqueness(const ExperimentConfig& c, const RunOptions& o);
SuiteResult run_limit(const ExperimentConfig& c, const RunOptions& o);

/// Dispatch by subcommand name; throws ConfigError for an unknown name.
SuiteResult run_suite(const std::string& name, const ExperimentConfig& c, const RunOptions& o);

/// exp(-|x - c|^2 / (2 sigma^2)) centred in omega.
Field gaussian(const Grid& g, double sigma);

/// Relative L2(omega) gap between the pair composition div^s grad^s and the spectral
/// (-Delta)^s on a Gaussian of width 0.35.
double composition_error(const Grid& g, double s, int pad = 8);

/// True when every value is strictly below its predecessor.
bool strictly_decreasing(const std::vector<double>& v);

}  // namespace afc
