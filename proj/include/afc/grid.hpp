#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace afc {

/// Nodal values of a scalar function, one entry per grid node.
using Field = Eigen::VectorXd;

enum class Region : std::uint8_t { Interior, Exterior, Window1, Window2 };

/// Axis-aligned open box (lo, hi) given per axis.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    bool contains(const double* x, int dim) const;
    bool intersects(const Box& other) const;
};

struct GridConfig {
    int dim = 1;
    double L = 3.141592653589793;
    int N = 128;
    Box omega;
    Box w1;
    Box w2;
};

/// Cell-centred periodic grid on [-L, L)^dim.
///
/// Node (i_0, ..., i_{d-1}) sits at x_a = -L + (i_a + 1/2) h and owns the
/// cell of side h around it, so the cells tile the box exactly. Nodes are
/// numbered row-major with axis 0 slowest.
class Grid {
public:
    static Grid build(const GridConfig& cfg);

    int dim() const { return cfg_.dim; }
    int n() const { return cfg_.N; }
    std::size_t size() const { return size_; }
    double L() const { return cfg_.L; }
    double h() const { return h_; }
    double weight() const { return weight_; }
    const GridConfig& config() const { return cfg_; }

    double coord(std::size_t node, int axis) const;
    std::array<double, 2> point(std::size_t node) const;
    std::array<int, 2> index(std::size_t node) const;
    std::size_t node(const std::array<int, 2>& idx) const;

    Region region(std::size_t node) const { return region_[node]; }
    bool interior(std::size_t node) const { return region_[node] == Region::Interior; }
    bool exterior(std::size_t node) const { return region_[node] != Region::Interior; }

    const std::vector<std::size_t>& interior_nodes() const { return interior_; }
    const std::vector<std::size_t>& exterior_nodes() const { return exterior_; }
    const std::vector<std::size_t>& window_nodes(int which) const { return which == 1 ? w1_ : w2_; }

    /// Quadrature weights, h^dim at every node.
    Field weights() const { return Field::Constant(static_cast<Eigen::Index>(size_), weight_); }

    /// Evaluate f(x) at every node; f receives a pointer to dim coordinates.
    template <class F>
    Field sample(F&& f) const {
        Field out(static_cast<Eigen::Index>(size_));
        for (std::size_t a = 0; a < size_; ++a) {
            auto p = point(a);
            out[static_cast<Eigen::Index>(a)] = f(p.data());
        }
        return out;
    }

    /// Stable 64-bit fingerprint of the configuration.
    std::uint64_t hash() const;

    bool same_as(const Grid& other) const { return hash() == other.hash(); }

private:
    GridConfig cfg_;
    double h_ = 0.0;
    double weight_ = 0.0;
    std::size_t size_ = 0;
    std::vector<Region> region_;
    std::vector<std::size_t> interior_, exterior_, w1_, w2_;
};

/// Quadrature inner product sum_x w(x) u(x) v(x).
double inner(const Grid& g, const Field& u, const Field& v);
/// Quadrature L2 norm.
double l2_norm(const Grid& g, const Field& u);
/// Quadrature L2 norm restricted to interior nodes.
double l2_norm_interior(const Grid& g, const Field& u);

/// Smooth compactly supported bump exp(1 - 1/(1 - r^2)) with r = |x - c| / radius.
double bump_value(const double* x, const double* centre, double radius, int dim);
Field bump(const Grid& g, const std::array<double, 2>& centre, double radius);
/// Bump centred in Omega whose radius is `fraction` of the smallest half-width of Omega.
Field omega_bump(const Grid& g, double fraction = 0.9);
/// Bump centred in the given window, radius `fraction` of its smallest half-width.
Field window_bump(const Grid& g, int which, double fraction = 0.9);

}  // namespace afc
