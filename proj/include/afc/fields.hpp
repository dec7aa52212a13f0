#pragma once

#include "afc/grid.hpp"

#include <cstdint>
#include <vector>

namespace afc {

/// dim x dim matrix per node, entries stored row-major in columns i * dim + j.
struct MatrixField {
    int dim = 1;
    Eigen::MatrixXd values;  // nodes x dim^2

    MatrixField() = default;
    MatrixField(std::size_t nodes, int d) : dim(d), values(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nodes), d * d)) {}

    std::size_t nodes() const { return static_cast<std::size_t>(values.rows()); }
    double& at(std::size_t node, int i, int j) { return values(static_cast<Eigen::Index>(node), i * dim + j); }
    double at(std::size_t node, int i, int j) const { return values(static_cast<Eigen::Index>(node), i * dim + j); }
    Field entry(int i, int j) const { return values.col(i * dim + j); }
    void set_entry(int i, int j, const Field& f) { values.col(i * dim + j) = f; }

    static MatrixField constant(std::size_t nodes, const Eigen::MatrixXd& m);
    static MatrixField scaled_identity(const Field& f, int dim);
};

/// Frobenius product sum_ij M_ij N_ij at each node.
Field frobenius(const MatrixField& m, const MatrixField& n);

enum class PairShape : std::uint8_t { Scalar, Vector, Matrix };

/// Dense two-point field over ordered node pairs (x_i, y_j), row-major in (i, j, component).
struct PairField {
    std::uint64_t grid_hash = 0;
    std::size_t nodes = 0;
    PairShape shape = PairShape::Scalar;
    int comps = 1;
    std::vector<double> data;

    PairField() = default;
    PairField(const Grid& g, PairShape sh);

    double* at(std::size_t i, std::size_t j) { return data.data() + (i * nodes + j) * static_cast<std::size_t>(comps); }
    const double* at(std::size_t i, std::size_t j) const { return data.data() + (i * nodes + j) * static_cast<std::size_t>(comps); }
};

}  // namespace afc
