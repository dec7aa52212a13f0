#include "afc/grid.hpp"

#include "afc/error.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <string>

namespace afc {

bool Box::contains(const double* x, int dim) const {
    for (int a = 0; a < dim; ++a) {
        if (!(x[a] > lo[a] && x[a] < hi[a])) return false;
    }
    return true;
}

bool Box::intersects(const Box& other) const {
    for (std::size_t a = 0; a < lo.size(); ++a) {
        if (std::max(lo[a], other.lo[a]) >= std::min(hi[a], other.hi[a])) return false;
    }
    return true;
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_box(const Box& b, int dim, double L, const char* name) {
    if (static_cast<int>(b.lo.size()) != dim || static_cast<int>(b.hi.size()) != dim) {
        throw ConfigError(std::string(name) + ": expected " + std::to_string(dim) + " bounds per side");
    }
    for (int a = 0; a < dim; ++a) {
        if (!(b.lo[a] < b.hi[a])) throw Error(std::string(name) + ": empty box (min >= max)");
        if (b.lo[a] < -L || b.hi[a] > L) throw Error(std::string(name) + ": box leaves [-L, L]");
    }
}

}  // namespace

Grid Grid::build(const GridConfig& cfg) {
    if (cfg.dim != 1 && cfg.dim != 2) throw Error("grid: dim must be 1 or 2");
    if (!power_of_two(cfg.N)) throw Error("grid: N must be a power of two");
    if (!(cfg.L > 0.0)) throw Error("grid: L must be positive");
    Grid g;
    g.cfg_ = cfg;
    g.h_ = 2.0 * cfg.L / cfg.N;
    g.weight_ = std::pow(g.h_, cfg.dim);
    g.size_ = static_cast<std::size_t>(cfg.N) * (cfg.dim == 2 ? static_cast<std::size_t>(cfg.N) : 1u);
    if (g.size_ < 8) throw Error("grid: fewer than 8 nodes");

    check_box(cfg.omega, cfg.dim, cfg.L, "omega");
    check_box(cfg.w1, cfg.dim, cfg.L, "w1");
    check_box(cfg.w2, cfg.dim, cfg.L, "w2");
    for (int a = 0; a < cfg.dim; ++a) {
        if (cfg.omega.lo[a] + cfg.L < 2.0 * g.h_ || cfg.L - cfg.omega.hi[a] < 2.0 * g.h_) {
            throw Error("grid: omega must keep a margin of at least 2h from the box boundary");
        }
    }
    if (cfg.w1.intersects(cfg.w2)) throw Error("grid: windows w1 and w2 overlap");
    if (cfg.w1.intersects(cfg.omega) || cfg.w2.intersects(cfg.omega)) {
        throw Error("grid: windows must lie in the exterior of omega");
    }

    g.region_.resize(g.size_);
    for (std::size_t a = 0; a < g.size_; ++a) {
        auto p = g.point(a);
        Region r = Region::Exterior;
        if (cfg.omega.contains(p.data(), cfg.dim)) {
            r = Region::Interior;
        } else if (cfg.w1.contains(p.data(), cfg.dim)) {
            r = Region::Window1;
        } else if (cfg.w2.contains(p.data(), cfg.dim)) {
            r = Region::Window2;
        }
        g.region_[a] = r;
        if (r == Region::Interior) {
            g.interior_.push_back(a);
        } else {
            g.exterior_.push_back(a);
        }
        if (r == Region::Window1) g.w1_.push_back(a);
        if (r == Region::Window2) g.w2_.push_back(a);
    }
    if (g.interior_.empty()) throw Error("grid: omega contains no nodes");
    if (g.w1_.empty() || g.w2_.empty()) throw Error("grid: a window contains no nodes");
    return g;
}

double Grid::coord(std::size_t node, int axis) const {
    auto idx = index(node);
    return -cfg_.L + (idx[static_cast<std::size_t>(axis)] + 0.5) * h_;
}

std::array<double, 2> Grid::point(std::size_t node) const {
    auto idx = index(node);
    std::array<double, 2> p{0.0, 0.0};
    for (int a = 0; a < cfg_.dim; ++a) p[static_cast<std::size_t>(a)] = -cfg_.L + (idx[static_cast<std::size_t>(a)] + 0.5) * h_;
    return p;
}

std::array<int, 2> Grid::index(std::size_t node) const {
    if (cfg_.dim == 1) return {static_cast<int>(node), 0};
    return {static_cast<int>(node / static_cast<std::size_t>(cfg_.N)), static_cast<int>(node % static_cast<std::size_t>(cfg_.N))};
}

std::size_t Grid::node(const std::array<int, 2>& idx) const {
    if (cfg_.dim == 1) return static_cast<std::size_t>(idx[0]);
    return static_cast<std::size_t>(idx[0]) * static_cast<std::size_t>(cfg_.N) + static_cast<std::size_t>(idx[1]);
}

std::uint64_t Grid::hash() const {
    std::ostringstream os;
    os.precision(17);
    os << cfg_.dim << '|' << cfg_.L << '|' << cfg_.N;
    for (const Box* b : {&cfg_.omega, &cfg_.w1, &cfg_.w2}) {
        for (int a = 0; a < cfg_.dim; ++a) os << '|' << b->lo[static_cast<std::size_t>(a)] << ',' << b->hi[static_cast<std::size_t>(a)];
    }
    const std::string s = os.str();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

double inner(const Grid& g, const Field& u, const Field& v) { return g.weight() * u.dot(v); }

double l2_norm(const Grid& g, const Field& u) { return std::sqrt(g.weight() * u.squaredNorm()); }

double l2_norm_interior(const Grid& g, const Field& u) {
    double acc = 0.0;
    for (auto a : g.interior_nodes()) acc += u[static_cast<Eigen::Index>(a)] * u[static_cast<Eigen::Index>(a)];
    return std::sqrt(g.weight() * acc);
}

double bump_value(const double* x, const double* centre, double radius, int dim) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double t = (x[a] - centre[a]) / radius;
        r2 += t * t;
    }
    if (r2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r2));
}

Field bump(const Grid& g, const std::array<double, 2>& centre, double radius) {
    return g.sample([&](const double* x) { return bump_value(x, centre.data(), radius, g.dim()); });
}

namespace {

Field box_bump(const Grid& g, const Box& b, double fraction) {
    std::array<double, 2> c{0.0, 0.0};
    double half = 1e300;
    for (int a = 0; a < g.dim(); ++a) {
        auto ua = static_cast<std::size_t>(a);
        c[ua] = 0.5 * (b.lo[ua] + b.hi[ua]);
        half = std::min(half, 0.5 * (b.hi[ua] - b.lo[ua]));
    }
    return bump(g, c, fraction * half);
}

}  // namespace

Field omega_bump(const Grid& g, double fraction) { return box_bump(g, g.config().omega, fraction); }

Field window_bump(const Grid& g, int which, double fraction) {
    return box_bump(g, which == 1 ? g.config().w1 : g.config().w2, fraction);
}

}  // namespace afc
