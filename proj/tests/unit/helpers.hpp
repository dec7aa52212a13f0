#pragma once

#include "afc/grid.hpp"

#include <cmath>

namespace afc::test {

inline GridConfig line(int N = 128) {
    GridConfig c;
    c.dim = 1;
    c.L = M_PI;
    c.N = N;
    c.omega = {{-1.0}, {1.0}};
    c.w1 = {{-2.5}, {-1.5}};
    c.w2 = {{1.5}, {2.5}};
    return c;
}

inline GridConfig square(int N = 16) {
    GridConfig c;
    c.dim = 2;
    c.L = M_PI;
    c.N = N;
    c.omega = {{-1.0, -1.0}, {1.0, 1.0}};
    c.w1 = {{-2.8, -0.6}, {-1.6, 0.6}};
    c.w2 = {{1.6, -0.6}, {2.8, 0.6}};
    return c;
}

inline double rel(const Field& a, const Field& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace afc::test
