#pragma once

#include "afc/anisotropy.hpp"

#include <json.hpp>

#include <string>

namespace afc {

using json = nlohmann::ordered_json;

/// Deterministic JSON text: two-space indent, insertion order, trailing newline.
std::string dump_json(const json& j);
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

/// CSV with columns index, x0[, x1], value.
void write_field_csv(const std::string& path, const Grid& g, const Field& u);
Field read_field_csv(const std::string& path, const Grid& g);

/// Metadata record for a field export.
json field_metadata(const Grid& g, const std::string& name);

/// Raw little-endian doubles in `path` plus a JSON header in `path + ".json"`.
void write_pair_dump(const std::string& path, const Grid& g, const PairField& p, double s);
void write_matrix_dump(const std::string& path, const Eigen::MatrixXd& m, const json& header);
Eigen::MatrixXd read_matrix_dump(const std::string& path);

/// Manifest {"dim": d, "entries": [{"kind": "beta" | "phi", "file": "..."}]}; each file is a CSV
/// with columns index, coordinates, m00, m01, ... (row-major dim x dim). Paths are relative to
/// the manifest directory.
PhiSequence read_phi_manifest(const Grid& g, const std::string& path);
void write_phi_manifest(const std::string& dir, const Grid& g, const PhiSequence& phi);

}  // namespace afc
