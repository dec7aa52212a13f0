#include "afc/config.hpp"
#include "afc/error.hpp"
#include "afc/experiments.hpp"
#include "afc/io.hpp"
#include "afc/parallel.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

void emit_error(const std::string& command, const std::string& kind, const std::string& message, const std::string& out_dir) {
    afc::json j;
    j["schema_version"] = afc::kSchemaVersion;
    j["command"] = command;
    j["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << afc::dump_json(j);
    if (!out_dir.empty()) {
        try {
            afc::write_json((std::filesystem::path(out_dir) / "error.json").string(), j);
        } catch (const std::exception&) {
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anisotropic fractional conductivity experiments"};
    app.require_subcommand(1, 1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int threads = 1, refine = 0;
    bool seed_given = false;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"identities", "adjointness, composition, gauge, self-adjointness, kernel-split and positivity suites"},
        {"decompose", "Mercer decomposition of the interior kernel and roundtrip checks"},
        {"solve", "exterior-value problem, direct and transformed"},
        {"dn", "Dirichlet-to-Neumann matrices and their symmetry"},
        {"alessandrini", "both sides of the integral identity for a gauge pair"},
        {"runge", "Runge approximation residual curve"},
        {"uniqueness", "DN distinguishability of a gauge pair against the rho = 0 control"},
        {"limit", "s -> 1 sweep against the classical operator"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--threads", threads, "worker count")->check(CLI::Range(1, 256));
        sub->add_option("--refine", refine, "extra refinement levels (N, 2N, ...)")->check(CLI::Range(0, 4));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    afc::set_num_threads(threads);
    try {
        afc::ExperimentConfig cfg = afc::load_config(config_path);
        if (seed_given) afc::set_seed(cfg, seed);
        if (out_dir.empty()) out_dir = cfg.output;
        afc::RunOptions opt;
        opt.out_dir = out_dir;
        opt.refine = refine;
        const afc::SuiteResult r = afc::run_suite(command, cfg, opt);
        const std::string text = afc::dump_json(r.report);
        std::cout << text;
        if (!out_dir.empty()) afc::write_text((std::filesystem::path(out_dir) / (command + ".json")).string(), text);
        return r.pass ? kPass : kFail;
    } catch (const afc::ConfigError& e) {
        emit_error(command, "config", e.what(), out_dir);
        return kUsage;
    } catch (const std::exception& e) {
        emit_error(command, "runtime", e.what(), out_dir);
        return kFail;
    }
}
