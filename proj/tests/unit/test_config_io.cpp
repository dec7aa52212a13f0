#include "helpers.hpp"

#include "afc/config.hpp"
#include "afc/error.hpp"
#include "afc/io.hpp"
#include "afc/parallel.hpp"
#include "afc/presets.hpp"

#include <doctest.h>

#include <filesystem>

using namespace afc;
using afc::test::square;

namespace fs = std::filesystem;

namespace {

json base_config() {
    return json::parse(R"({
        "grid": {"dim": 1, "N": 64, "omega_min": -1, "omega_max": 1,
                 "w1_min": -2.5, "w1_max": -1.5, "w2_min": 1.5, "w2_max": 2.5},
        "kernel": {"type": "rank-R-random", "rank": 3},
        "seed": 42
    })");
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "afc_unit" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config: parsing and defaults") {
    const ExperimentConfig c = parse_config(base_config());
    CHECK(c.grid.N == 64);
    CHECK(c.s == 0.45);
    CHECK(c.s_list.size() == 6);
    CHECK(c.kernel.seed == 42);
    CHECK_FALSE(c.kernel_seed_set);

    ExperimentConfig d = c;
    set_seed(d, 7);
    CHECK(d.kernel.seed == 7);

    json j = base_config();
    j["kernel"]["seed"] = 5;
    ExperimentConfig e = parse_config(j);
    set_seed(e, 7);
    CHECK(e.kernel.seed == 5);

    const ExperimentConfig back = parse_config(config_to_json(c));
    CHECK(dump_json(config_to_json(back)) == dump_json(config_to_json(c)));
    CHECK(refined(c, 2).grid.N == 256);
}

TEST_CASE("config: rejects bad input") {
    json j = base_config();
    j["extra"] = 1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = base_config();
    j["grid"]["spacing"] = 0.1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = base_config();
    j["kernel"]["type"] = "hexagonal";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = base_config();
    j["s"] = 1.0;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = base_config();
    j["s_list"] = {0.9, 0.8};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = base_config();
    j["tolerances"] = {{"nonsense", 1.0}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = base_config();
    j["grid"].erase("w2_max");
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    const fs::path dir = scratch("config");
    write_text((dir / "broken.json").string(), "{\"grid\": ");
    CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ConfigError);
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("io: deterministic JSON text") {
    json j;
    j["b"] = 0.1;
    j["a"] = {1, 2};
    const std::string t = dump_json(j);
    CHECK(t.back() == '\n');
    CHECK(t.find("\"b\"") < t.find("\"a\""));
    CHECK(dump_json(json::parse(t)) == t);
}

TEST_CASE("io: field csv, matrix dumps and Phi manifests") {
    const Grid g = Grid::build(square(8));
    const fs::path dir = scratch("io");
    const Field u = g.sample([](const double* x) { return std::sin(x[0]) / 3.0 + x[1] * 1e-17; });
    write_field_csv((dir / "u.csv").string(), g, u);
    CHECK(read_field_csv((dir / "u.csv").string(), g) == u);

    Eigen::MatrixXd m(3, 2);
    m << 1.0 / 3.0, -2.0, 1e-300, 4.5, M_PI, -0.0;
    write_matrix_dump((dir / "m.bin").string(), m, {{"tag", "x"}});
    CHECK(read_matrix_dump((dir / "m.bin").string()) == m);
    CHECK(fs::exists(dir / "m.bin.json"));

    PresetSpec p;
    p.type = "rank-R-random";
    p.rank = 2;
    const PhiSequence phi = build_preset(g, p);
    write_phi_manifest((dir / "phi").string(), g, phi);
    const PhiSequence back = read_phi_manifest(g, (dir / "phi" / "manifest.json").string());
    REQUIRE(back.size() == phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        CHECK(back.entries[k].kind == phi.entries[k].kind);
        CHECK(back.entries[k].field.values == phi.entries[k].field.values);
    }
    PresetSpec files;
    files.type = "phi-files";
    files.manifest = (dir / "phi" / "manifest.json").string();
    CHECK(build_preset(g, files).size() == phi.size());
}

TEST_CASE("parallel: results do not depend on the worker count") {
    const Grid g = Grid::build(square(8));
    PresetSpec p;
    p.type = "rank-R-random";
    set_num_threads(1);
    const AnisotropyKernel one = kernel_from_phi(g, build_preset(g, p));
    set_num_threads(4);
    const AnisotropyKernel four = kernel_from_phi(g, build_preset(g, p));
    set_num_threads(1);
    CHECK(one.data == four.data);
}
