#include "curbside/eikonal.hpp"

#include <cmath>
#include <queue>

#include "curbside/errors.hpp"

namespace curbside::eikonal {

namespace {

// (value, cell index) min-heap entry; index as tie-break keeps pops in a
// total order independent of insertion history.
using HeapEntry = std::pair<double, int>;

} // namespace

ScalarField solve_eikonal(const ScalarField& cost, std::span<const int> targets) {
    const GridShape& shape = cost.shape;
    const int nx = shape.nx;
    const int ny = shape.ny;
    const int n = shape.cell_count();
    if (targets.empty()) {
        throw ValidationError("solve_eikonal: empty target set");
    }
    for (int i = 0; i < n; ++i) {
        const double c = cost.values[i];
        if (std::isnan(c)) {
            throw ValidationError("solve_eikonal: NaN cost");
        }
        if (std::isfinite(c) && c < kMinCost) {
            throw ValidationError("solve_eikonal: finite cost below the admissible floor");
        }
    }

    ScalarField phi(shape, kInf);
    std::vector<std::uint8_t> accepted(static_cast<std::size_t>(n), 0);
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;

    for (int t : targets) {
        if (t < 0 || t >= n) {
            throw ValidationError("solve_eikonal: target outside the grid");
        }
        if (!std::isfinite(cost.values[t])) {
            throw ValidationError("solve_eikonal: target on an infinite-cost cell");
        }
        phi.values[t] = 0.0;
        heap.push({0.0, t});
    }

    const double h = shape.cell_size;
    auto axis_min = [&](int ix, int iy, int dx, int dy) {
        double best = kInf;
        for (int s = -1; s <= 1; s += 2) {
            const int jx = ix + s * dx;
            const int jy = iy + s * dy;
            if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
            const int j = jy * nx + jx;
            if (accepted[j] && phi.values[j] < best) best = phi.values[j];
        }
        return best;
    };

    while (!heap.empty()) {
        const auto [value, idx] = heap.top();
        heap.pop();
        if (accepted[idx] || value != phi.values[idx]) continue; // stale entry
        accepted[idx] = 1;
        const int ix = idx % nx;
        const int iy = idx / nx;
        const int nbr[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
        for (const auto& [jx, jy] : nbr) {
            if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
            const int j = jy * nx + jx;
            if (accepted[j]) continue;
            const double c = cost.values[j];
            if (!std::isfinite(c)) continue;

            // Two-axis upwind quadratic: use the smaller accepted value per
            // axis, fall back to the one-axis update when they are far apart.
            const double px = axis_min(jx, jy, 1, 0);
            const double py = axis_min(jx, jy, 0, 1);
            const double lo = std::min(px, py);
            const double hi = std::max(px, py);
            if (lo == kInf) continue;
            const double step = c * h;
            double cand;
            if (hi - lo >= step || hi == kInf) {
                cand = lo + step;
            } else {
                const double d = hi - lo;
                cand = 0.5 * (lo + hi + std::sqrt(2.0 * step * step - d * d));
            }
            if (cand < phi.values[j]) {
                phi.values[j] = cand;
                heap.push({cand, j});
            }
        }
    }
    return phi;
}

namespace {

// Gradient at one grid node; central difference when both axis neighbors are
// finite, one-sided otherwise. Returns false when the node itself is +inf.
bool node_gradient(const ScalarField& phi, int ix, int iy, Vec2& out) {
    const GridShape& s = phi.shape;
    const double center = phi.at(ix, iy);
    if (!std::isfinite(center)) return false;
    const double h = s.cell_size;
    auto axis = [&](int dx, int dy) {
        const bool has_lo = s.in_bounds(ix - dx, iy - dy);
        const bool has_hi = s.in_bounds(ix + dx, iy + dy);
        const double lo = has_lo ? phi.at(ix - dx, iy - dy) : kInf;
        const double hi = has_hi ? phi.at(ix + dx, iy + dy) : kInf;
        const bool lo_ok = std::isfinite(lo);
        const bool hi_ok = std::isfinite(hi);
        if (lo_ok && hi_ok) return (hi - lo) / (2.0 * h);
        if (hi_ok) return (hi - center) / h;
        if (lo_ok) return (center - lo) / h;
        return 0.0;
    };
    out = {axis(1, 0), axis(0, 1)};
    return true;
}

} // namespace

std::optional<Vec2> try_sample_gradient(const ScalarField& phi, Vec2 p) {
    const GridShape& s = phi.shape;
    if (s.nx < 2 || s.ny < 2) return std::nullopt;
    const double gx = (p.x - s.origin.x) / s.cell_size;
    const double gy = (p.y - s.origin.y) / s.cell_size;
    int i0 = static_cast<int>(std::floor(gx));
    int j0 = static_cast<int>(std::floor(gy));
    i0 = std::clamp(i0, 0, s.nx - 2);
    j0 = std::clamp(j0, 0, s.ny - 2);
    const double fx = std::clamp(gx - i0, 0.0, 1.0);
    const double fy = std::clamp(gy - j0, 0.0, 1.0);

    const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    const int cx[4] = {i0, i0 + 1, i0, i0 + 1};
    const int cy[4] = {j0, j0, j0 + 1, j0 + 1};

    Vec2 acc{0.0, 0.0};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        Vec2 g;
        if (!node_gradient(phi, cx[k], cy[k], g)) continue;
        acc += g * w[k];
        total += w[k];
    }
    if (total <= 0.0) return std::nullopt;
    return acc / total;
}

Vec2 sample_gradient(const ScalarField& phi, Vec2 p) {
    const auto g = try_sample_gradient(phi, p);
    if (!g) {
        throw SimulationError("stuck: potential gradient unavailable at the queried point");
    }
    return *g;
}

} // namespace curbside::eikonal
