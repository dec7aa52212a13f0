#include "afc/io.hpp"

#include "afc/error.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace afc {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    return out;
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path, std::size_t expect_cols) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error(path + ": malformed number '" + cell + "'");
            }
        }
        if (row.size() != expect_cols) throw Error(path + ": expected " + std::to_string(expect_cols) + " columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string coord_header(const Grid& g) { return g.dim() == 1 ? "index,x0" : "index,x0,x1"; }

void write_coords(std::ostream& out, const Grid& g, std::size_t a) {
    out << a;
    for (int d = 0; d < g.dim(); ++d) out << ',' << num(g.coord(a, d));
}

}  // namespace

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, dump_json(j)); }

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

void write_field_csv(const std::string& path, const Grid& g, const Field& u) {
    if (static_cast<std::size_t>(u.size()) != g.size()) throw Error("write_field_csv: field does not match the grid");
    auto out = open_out(path);
    out << coord_header(g) << ",value\n";
    for (std::size_t a = 0; a < g.size(); ++a) {
        write_coords(out, g, a);
        out << ',' << num(u[static_cast<Eigen::Index>(a)]) << '\n';
    }
}

Field read_field_csv(const std::string& path, const Grid& g) {
    const auto rows = read_csv_rows(path, static_cast<std::size_t>(g.dim()) + 2);
    if (rows.size() != g.size()) throw Error(path + ": row count does not match the grid");
    Field u(static_cast<Eigen::Index>(g.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
        if (static_cast<std::size_t>(rows[a][0]) != a) throw Error(path + ": rows out of order");
        u[static_cast<Eigen::Index>(a)] = rows[a].back();
    }
    return u;
}

json field_metadata(const Grid& g, const std::string& name) {
    json j;
    j["name"] = name;
    j["grid_hash"] = g.hash();
    j["dim"] = g.dim();
    j["N"] = g.n();
    j["L"] = g.L();
    j["nodes"] = g.size();
    return j;
}

void write_matrix_dump(const std::string& path, const Eigen::MatrixXd& m, const json& header) {
    json h = header;
    h["rows"] = m.rows();
    h["cols"] = m.cols();
    h["layout"] = "row-major float64 little-endian";
    write_json(path + ".json", h);
    auto out = open_out(path, std::ios::out | std::ios::binary);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rm.size())));
}

Eigen::MatrixXd read_matrix_dump(const std::string& path) {
    const json h = read_json(path + ".json");
    const auto rows = h.at("rows").get<Eigen::Index>();
    const auto cols = h.at("cols").get<Eigen::Index>();
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rm.size())));
    if (!in) throw Error(path + ": truncated dump");
    return rm;
}

void write_pair_dump(const std::string& path, const Grid& g, const PairField& p, double s) {
    json h;
    h["grid_hash"] = g.hash();
    h["s"] = s;
    h["shape"] = p.shape == PairShape::Scalar ? "scalar" : p.shape == PairShape::Vector ? "vector" : "matrix";
    h["components"] = p.comps;
    h["nodes"] = p.nodes;
    h["layout"] = "(x, y, component) row-major float64 little-endian";
    write_json(path + ".json", h);
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(reinterpret_cast<const char*>(p.data.data()), static_cast<std::streamsize>(sizeof(double) * p.data.size()));
}

PhiSequence read_phi_manifest(const Grid& g, const std::string& path) {
    const json m = read_json(path);
    const fs::path base = fs::path(path).parent_path();
    PhiSequence phi;
    try {
        phi.dim = m.at("dim").get<int>();
        if (phi.dim != g.dim()) throw ConfigError(path + ": manifest dim does not match the grid");
        for (const auto& e : m.at("entries")) {
            const std::string kind = e.at("kind").get<std::string>();
            if (kind != "beta" && kind != "phi") throw ConfigError(path + ": entry kind must be 'beta' or 'phi'");
            const std::string file = (base / e.at("file").get<std::string>()).string();
            const std::size_t dd = static_cast<std::size_t>(phi.dim * phi.dim);
            const auto rows = read_csv_rows(file, 1 + static_cast<std::size_t>(phi.dim) + dd);
            if (rows.size() != g.size()) throw ConfigError(file + ": row count does not match the grid");
            MatrixField f(g.size(), phi.dim);
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t c = 0; c < dd; ++c)
                    f.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = rows[a][1 + static_cast<std::size_t>(phi.dim) + c];
            phi.entries.push_back({kind == "beta" ? PhiKind::Beta : PhiKind::Phi, std::move(f)});
        }
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    phi.validate(g);
    return phi;
}

void write_phi_manifest(const std::string& dir, const Grid& g, const PhiSequence& phi) {
    json m;
    m["dim"] = phi.dim;
    m["grid_hash"] = g.hash();
    m["entries"] = json::array();
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const std::string file = "phi_" + std::to_string(k) + ".csv";
        m["entries"].push_back({{"kind", phi.entries[k].kind == PhiKind::Beta ? "beta" : "phi"}, {"file", file}});
        auto out = open_out((fs::path(dir) / file).string());
        out << coord_header(g);
        for (int i = 0; i < phi.dim; ++i)
            for (int j = 0; j < phi.dim; ++j) out << ",m" << i << j;
        out << '\n';
        for (std::size_t a = 0; a < g.size(); ++a) {
            write_coords(out, g, a);
            for (int c = 0; c < phi.dim * phi.dim; ++c) out << ',' << num(phi.entries[k].field.values(static_cast<Eigen::Index>(a), c));
            out << '\n';
        }
    }
    write_json((fs::path(dir) / "manifest.json").string(), m);
}

}  // namespace afc
