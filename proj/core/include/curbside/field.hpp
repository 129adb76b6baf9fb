#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "curbside/vec.hpp"

namespace curbside {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Discretization shared by the BEV grid and every scalar field living on it.
// `origin` is the world position of the center of cell (0,0); cell (ix,iy)
// covers the square of side cell_size centered at origin + (ix,iy)*cell_size.
struct GridShape {
    int nx = 0;
    int ny = 0;
    double cell_size = 0.25; // meters
    Vec2 origin;

    int cell_count() const { return nx * ny; }
    bool in_bounds(int ix, int iy) const { return ix >= 0 && ix < nx && iy >= 0 && iy < ny; }
    int index(int ix, int iy) const { return iy * nx + ix; }

    Vec2 cell_center(int ix, int iy) const {
        return {origin.x + ix * cell_size, origin.y + iy * cell_size};
    }
    Vec2 cell_center(int idx) const { return cell_center(idx % nx, idx / nx); }

    // Cell containing a world point (may be out of bounds).
    std::pair<int, int> cell_of(Vec2 p) const {
        const int ix = static_cast<int>(std::floor((p.x - origin.x) / cell_size + 0.5));
        const int iy = static_cast<int>(std::floor((p.y - origin.y) / cell_size + 0.5));
        return {ix, iy};
    }

    bool operator==(const GridShape&) const = default;
};

// One grid-aligned field: discomfort G, speed V, unit cost C or potential phi.
// Values are non-negative or +inf; +inf marks forbidden / unreachable cells.
struct ScalarField {
    GridShape shape;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridShape& s, double fill = 0.0)
        : shape(s), values(static_cast<std::size_t>(s.cell_count()), fill) {}

    double& at(int ix, int iy) { return values[shape.index(ix, iy)]; }
    double at(int ix, int iy) const { return values[shape.index(ix, iy)]; }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool operator==(const ScalarField&) const = default;
};

} // namespace curbside
