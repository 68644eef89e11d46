#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "polysense/analytic.hpp"
#include "polysense/geometry.hpp"

namespace fixtures {

inline polysense::geom::Polygon unit_square() {
    return polysense::geom::Polygon::build({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

/// Quadrangle with edges 9.434 (sqrt 89), 5.385 (sqrt 29), 10, 10*sqrt(2)
/// and a single concave angle of about 4.89 rad between the first two.
inline polysense::geom::Polygon quadrangle() {
    return polysense::geom::Polygon::build({{0, 0}, {8, 5}, {10, 0}, {10, 10}});
}

inline double quadrangle_phi() { return quadrangle().interior_angles()[0]; }

inline polysense::analytic::Arena arena_50() { return {50.0, 50.0, 20.0}; }

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

}  // namespace fixtures
