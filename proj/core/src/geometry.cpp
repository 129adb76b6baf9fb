#include "curbside/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curbside/errors.hpp"

namespace curbside::geometry {

namespace {

constexpr double kDenomEps = 1e-12;

// Solves the symmetric 3x3 system M p = r by Gaussian elimination with
// partial pivoting. Returns false when a pivot collapses (rank deficiency).
bool solve3x3(double M[3][3], double r[3], double out[3]) {
    double scale = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(M[i][j]));
    }
    if (scale == 0.0) return false;
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(M[perm[row]][col]) > std::abs(M[perm[best]][col])) best = row;
        }
        std::swap(perm[col], perm[best]);
        const double pivot = M[perm[col]][col];
        if (std::abs(pivot) < 1e-12 * scale) return false;
        for (int row = col + 1; row < 3; ++row) {
            const double f = M[perm[row]][col] / pivot;
            for (int j = col; j < 3; ++j) M[perm[row]][j] -= f * M[perm[col]][j];
            r[perm[row]] -= f * r[perm[col]];
        }
    }
    for (int col = 2; col >= 0; --col) {
        double acc = r[perm[col]];
        for (int j = col + 1; j < 3; ++j) acc -= M[perm[col]][j] * out[j];
        out[col] = acc / M[perm[col]][col];
    }
    return true;
}

} // namespace

GroundPlane fit_ground_plane(std::span<const PlaneSample> samples,
                             const CameraIntrinsics& intrinsics) {
    if (samples.size() < 3) {
        throw ValidationError("ground plane fit needs at least 3 samples");
    }
    const double f = intrinsics.focal_length_px;
    if (f <= 0.0) {
        throw ValidationError("focal_length_px must be > 0");
    }
    double M[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double r[3] = {0, 0, 0};
    for (const PlaneSample& s : samples) {
        if (!std::isfinite(s.z_m) || s.z_m <= 0.0) {
            throw ValidationError("plane samples require finite depth > 0");
        }
        const double u = (s.x_px - intrinsics.cx()) / f;
        const double v = (s.y_px - intrinsics.cy()) / f;
        const double row[3] = {u, v, 1.0};
        const double target = 1.0 / s.z_m;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) M[i][j] += row[i] * row[j];
            r[i] += row[i] * target;
        }
    }
    double p[3];
    if (!solve3x3(M, r, p)) {
        throw ValidationError("ground plane fit is rank-deficient (collinear samples)");
    }
    return GroundPlane{p[0], p[1], p[2]};
}

double plane_fit_residual(const GroundPlane& plane, std::span<const PlaneSample> samples,
                          const CameraIntrinsics& intrinsics) {
    const double f = intrinsics.focal_length_px;
    double acc = 0.0;
    for (const PlaneSample& s : samples) {
        const double u = (s.x_px - intrinsics.cx()) / f;
        const double v = (s.y_px - intrinsics.cy()) / f;
        const double e = plane.a * u + plane.b * v + plane.c - 1.0 / s.z_m;
        acc += e * e;
    }
    return acc;
}

bool plane_tilt_ok(const GroundPlane& plane, double max_tilt_deg) {
    const double n = std::sqrt(plane.a * plane.a + plane.b * plane.b + plane.c * plane.c);
    if (n < kDenomEps) return false;
    // Camera up is -Y; the ground-side normal is -(a,b,c)/n, so the cosine of
    // the tilt angle is b/n.
    return plane.b / n >= std::cos(max_tilt_deg * std::numbers::pi / 180.0);
}

GroundFrame GroundFrame::from_plane(const GroundPlane& plane) {
    const Vec3 v{plane.a, plane.b, plane.c};
    const double n2 = v.dot(v);
    if (n2 < kDenomEps) {
        throw ValidationError("degenerate ground plane (a,b,c) == 0");
    }
    GroundFrame fr;
    fr.foot = v * (1.0 / n2);
    fr.up = v * (-1.0 / std::sqrt(n2));
    Vec3 e1 = Vec3{1, 0, 0} - fr.up * fr.up.x;
    if (e1.norm() < 1e-9) {
        e1 = Vec3{0, 0, 1} - fr.up * fr.up.z;
    }
    fr.e1 = e1.normalized();
    fr.e2 = fr.up.cross(fr.e1);
    return fr;
}

std::optional<double> plane_depth_at_pixel(double x_px, double y_px,
                                           const CameraIntrinsics& intrinsics,
                                           const GroundPlane& plane) {
    const double f = intrinsics.focal_length_px;
    const double u = (x_px - intrinsics.cx()) / f;
    const double v = (y_px - intrinsics.cy()) / f;
    const double denom = plane.a * u + plane.b * v + plane.c;
    if (denom <= kDenomEps) return std::nullopt;
    return 1.0 / denom;
}

std::optional<Vec2> try_pixel_to_ground(double x_px, double y_px,
                                        const CameraIntrinsics& intrinsics,
                                        const GroundPlane& plane) {
    const auto z = plane_depth_at_pixel(x_px, y_px, intrinsics, plane);
    if (!z) return std::nullopt;
    const double f = intrinsics.focal_length_px;
    const Vec3 p{(x_px - intrinsics.cx()) / f * *z, (y_px - intrinsics.cy()) / f * *z, *z};
    return GroundFrame::from_plane(plane).bev_from_camera(p);
}

Vec2 pixel_to_ground(double x_px, double y_px, const CameraIntrinsics& intrinsics,
                     const GroundPlane& plane) {
    const auto bev = try_pixel_to_ground(x_px, y_px, intrinsics, plane);
    if (!bev) {
        throw ValidationError("horizon: pixel ray does not intersect the ground plane");
    }
    return *bev;
}

Vec2 ground_to_pixel(Vec2 bev, const CameraIntrinsics& intrinsics, const GroundPlane& plane) {
    const Vec3 p = GroundFrame::from_plane(plane).camera_from_bev(bev);
    if (p.z <= kDenomEps) {
        throw ValidationError("horizon: ground point projects behind the camera");
    }
    const double f = intrinsics.focal_length_px;
    return {f * p.x / p.z + intrinsics.cx(), f * p.y / p.z + intrinsics.cy()};
}

std::optional<Vec3> project_camera_point(Vec3 p, const CameraIntrinsics& intrinsics) {
    if (p.z <= kDenomEps) return std::nullopt;
    const double f = intrinsics.focal_length_px;
    return Vec3{f * p.x / p.z + intrinsics.cx(), f * p.y / p.z + intrinsics.cy(), p.z};
}

Vec3 sun_direction_camera(const Lighting& lighting, const GroundFrame& frame) {
    const double ce = std::cos(lighting.sun_elevation);
    const double se = std::sin(lighting.sun_elevation);
    const Vec2 az = sun_bearing_bev(lighting);
    return (frame.e1 * az.x + frame.e2 * az.y) * ce + frame.up * se;
}

Vec2 sun_bearing_bev(const Lighting& lighting) {
    return {std::cos(lighting.sun_azimuth), std::sin(lighting.sun_azimuth)};
}

SceneClass classify_scene(const LabelRaster& labels, double drivable_threshold) {
    std::size_t road = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == Label::Road) ++road;
    }
    const double fraction =
        labels.size() == 0 ? 0.0 : static_cast<double>(road) / static_cast<double>(labels.size());
    return fraction < drivable_threshold ? SceneClass::PedestrianOnly : SceneClass::Mixed;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> points) {
    std::sort(points.begin(), points.end(), [](Vec2 a, Vec2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    const std::size_t n = points.size();
    if (n < 3) return points;
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) { // lower
        while (k >= 2 && (hull[k - 1] - hull[k - 2]).cross(points[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = points[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) { // upper
        while (k >= lower && (hull[k - 1] - hull[k - 2]).cross(points[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

struct CellPoint {
    int ix;
    int iy;
};

// Offsets of a Euclidean disk of the given cell radius.
std::vector<CellPoint> disk_offsets(int radius) {
    std::vector<CellPoint> offs;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx * dx + dy * dy <= radius * radius) offs.push_back({dx, dy});
        }
    }
    return offs;
}

MaskGrid dilate(const MaskGrid& in, int radius) {
    if (radius <= 0) return in;
    MaskGrid out(in.width(), in.height(), 0);
    const auto offs = disk_offsets(radius);
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            if (!in.at(x, y)) continue;
            for (const auto& o : offs) {
                const int nx = x + o.ix;
                const int ny = y + o.iy;
                if (in.in_bounds(nx, ny)) out.at(nx, ny) = 1;
            }
        }
    }
    return out;
}

MaskGrid erode(const MaskGrid& in, int radius) {
    if (radius <= 0) return in;
    MaskGrid out(in.width(), in.height(), 0);
    const auto offs = disk_offsets(radius);
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            bool all = true;
            for (const auto& o : offs) {
                const int nx = x + o.ix;
                const int ny = y + o.iy;
                if (!in.in_bounds(nx, ny) || !in.at(nx, ny)) {
                    all = false;
                    break;
                }
            }
            out.at(x, y) = all ? 1 : 0;
        }
    }
    return out;
}

// 8-connected component labels in scan order; -1 where mask is false.
Grid<int> label_components(const MaskGrid& mask, int& count) {
    Grid<int> comp(mask.width(), mask.height(), -1);
    count = 0;
    std::vector<int> stack;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y) || comp.at(x, y) >= 0) continue;
            const int id = count++;
            stack.push_back(mask.index(x, y));
            comp.at(x, y) = id;
            while (!stack.empty()) {
                const int idx = stack.back();
                stack.pop_back();
                const int cx = idx % mask.width();
                const int cy = idx / mask.width();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (!mask.in_bounds(nx, ny) || !mask.at(nx, ny) || comp.at(nx, ny) >= 0)
                            continue;
                        comp.at(nx, ny) = id;
                        stack.push_back(mask.index(nx, ny));
                    }
                }
            }
        }
    }
    return comp;
}

bool point_in_hull(Vec2 p, const std::vector<Vec2>& hull) {
    constexpr double eps = 1e-9;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2 a = hull[i];
        const Vec2 b = hull[(i + 1) % hull.size()];
        if ((b - a).cross(p - a) < -eps) return false;
    }
    return true;
}

} // namespace

BevGrid build_bev(const LabelRaster& labels, const GroundPlane& plane,
                  const CameraIntrinsics& intrinsics, const BevOptions& options) {
    const double cs = options.cell_size_m;
    if (cs <= 0.0) {
        throw ValidationError("cell_size_m must be > 0");
    }
    auto walkable_label = [&](Label l) {
        return l == Label::Sidewalk || l == Label::Crosswalk ||
               (options.treat_road_as_walkable && l == Label::Road);
    };

    // Project walkable pixels; remember which came from the image boundary.
    std::vector<Vec2> walk_points;
    std::vector<std::uint8_t> walk_is_boundary;
    const double max_r2 = options.max_range_m * options.max_range_m;
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            if (!walkable_label(labels.at(x, y))) continue;
            const auto bev = try_pixel_to_ground(x, y, intrinsics, plane);
            if (!bev || bev->dot(*bev) > max_r2) continue;
            walk_points.push_back(*bev);
            const bool boundary =
                x == 0 || y == 0 || x == labels.width() - 1 || y == labels.height() - 1;
            walk_is_boundary.push_back(boundary ? 1 : 0);
        }
    }
    if (walk_points.empty()) {
        throw ValidationError("empty world: no walkable pixels project onto the ground in range");
    }

    // Ground contact of each obstacle blob: bottom row, mean column.
    std::vector<Vec2> obstacle_points;
    {
        MaskGrid obst(labels.width(), labels.height(), 0);
        for (int y = 0; y < labels.height(); ++y) {
            for (int x = 0; x < labels.width(); ++x) {
                if (labels.at(x, y) == Label::Obstacle) obst.at(x, y) = 1;
            }
        }
        int ncomp = 0;
        const Grid<int> comp = label_components(obst, ncomp);
        std::vector<int> bottom_row(ncomp, -1);
        std::vector<long> col_sum(ncomp, 0);
        std::vector<int> col_count(ncomp, 0);
        for (int y = 0; y < labels.height(); ++y) {
            for (int x = 0; x < labels.width(); ++x) {
                const int id = comp.at(x, y);
                if (id < 0) continue;
                if (y > bottom_row[id]) {
                    bottom_row[id] = y;
                    col_sum[id] = 0;
                    col_count[id] = 0;
                }
                if (y == bottom_row[id]) {
                    col_sum[id] += x;
                    col_count[id] += 1;
                }
            }
        }
        for (int id = 0; id < ncomp; ++id) {
            if (col_count[id] == 0) continue;
            const double contact_x =
                static_cast<double>(col_sum[id]) / static_cast<double>(col_count[id]);
            const auto bev = try_pixel_to_ground(contact_x, bottom_row[id], intrinsics, plane);
            if (bev && bev->dot(*bev) <= max_r2) obstacle_points.push_back(*bev);
        }
    }

    // Grid extent covering every projected point plus working margin.
    const int pad = options.dilation_radius_cells + options.obstacle_radius_cells + 2;
    double min_x = walk_points[0].x, max_x = walk_points[0].x;
    double min_y = walk_points[0].y, max_y = walk_points[0].y;
    auto expand = [&](Vec2 p) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    };
    for (const Vec2& p : walk_points) expand(p);
    for (const Vec2& p : obstacle_points) expand(p);

    BevGrid bev;
    bev.shape.cell_size = cs;
    const long lo_x = static_cast<long>(std::floor(min_x / cs)) - pad;
    const long lo_y = static_cast<long>(std::floor(min_y / cs)) - pad;
    const long hi_x = static_cast<long>(std::floor(max_x / cs)) + pad;
    const long hi_y = static_cast<long>(std::floor(max_y / cs)) + pad;
    bev.shape.origin = {static_cast<double>(lo_x) * cs, static_cast<double>(lo_y) * cs};
    bev.shape.nx = static_cast<int>(hi_x - lo_x + 1);
    bev.shape.ny = static_cast<int>(hi_y - lo_y + 1);
    if (static_cast<long>(bev.shape.nx) * bev.shape.ny > 8L * 1024 * 1024) {
        throw ValidationError("BEV grid too large; lower max_range_m or raise cell_size_m");
    }

    MaskGrid raw(bev.shape.nx, bev.shape.ny, 0);
    std::vector<int> boundary_cells;
    for (std::size_t i = 0; i < walk_points.size(); ++i) {
        const auto [ix, iy] = bev.shape.cell_of(walk_points[i]);
        if (!bev.shape.in_bounds(ix, iy)) continue;
        raw.at(ix, iy) = 1;
        if (walk_is_boundary[i]) boundary_cells.push_back(bev.shape.index(ix, iy));
    }

    // Components on the raw projection, then dilation + convex hull each.
    int ncomp = 0;
    const Grid<int> raw_comp = label_components(raw, ncomp);
    bev.component_count = ncomp;
    bev.walkable = MaskGrid(bev.shape.nx, bev.shape.ny, 0);
    bev.component_id = Grid<int>(bev.shape.nx, bev.shape.ny, -1);

    const auto dil_offs = disk_offsets(options.dilation_radius_cells);
    for (int id = 0; id < ncomp; ++id) {
        MaskGrid grown(bev.shape.nx, bev.shape.ny, 0);
        std::vector<Vec2> centers;
        for (int iy = 0; iy < bev.shape.ny; ++iy) {
            for (int ix = 0; ix < bev.shape.nx; ++ix) {
                if (raw_comp.at(ix, iy) != id) continue;
                for (const auto& o : dil_offs) {
                    const int gx = ix + o.ix;
                    const int gy = iy + o.iy;
                    if (bev.shape.in_bounds(gx, gy)) grown.at(gx, gy) = 1;
                }
            }
        }
        int grown_min_x = bev.shape.nx, grown_max_x = -1;
        int grown_min_y = bev.shape.ny, grown_max_y = -1;
        for (int iy = 0; iy < bev.shape.ny; ++iy) {
            for (int ix = 0; ix < bev.shape.nx; ++ix) {
                if (!grown.at(ix, iy)) continue;
                centers.push_back(bev.shape.cell_center(ix, iy));
                grown_min_x = std::min(grown_min_x, ix);
                grown_max_x = std::max(grown_max_x, ix);
                grown_min_y = std::min(grown_min_y, iy);
                grown_max_y = std::max(grown_max_y, iy);
                if (!bev.walkable.at(ix, iy)) {
                    bev.walkable.at(ix, iy) = 1;
                    bev.component_id.at(ix, iy) = id;
                }
            }
        }
        const auto hull = convex_hull(std::move(centers));
        if (hull.size() >= 3) {
            for (int iy = grown_min_y; iy <= grown_max_y; ++iy) {
                for (int ix = grown_min_x; ix <= grown_max_x; ++ix) {
                    if (bev.walkable.at(ix, iy)) continue;
                    if (point_in_hull(bev.shape.cell_center(ix, iy), hull)) {
                        bev.walkable.at(ix, iy) = 1;
                        bev.component_id.at(ix, iy) = id;
                    }
                }
            }
        }
    }

    // Obstacle footprints override walkability.
    bev.obstacle = MaskGrid(bev.shape.nx, bev.shape.ny, 0);
    const auto obs_offs = disk_offsets(options.obstacle_radius_cells);
    for (const Vec2& p : obstacle_points) {
        const auto [ix, iy] = bev.shape.cell_of(p);
        for (const auto& o : obs_offs) {
            const int gx = ix + o.ix;
            const int gy = iy + o.iy;
            if (!bev.shape.in_bounds(gx, gy)) continue;
            bev.obstacle.at(gx, gy) = 1;
            bev.walkable.at(gx, gy) = 0;
            bev.component_id.at(gx, gy) = -1;
        }
    }

    std::sort(boundary_cells.begin(), boundary_cells.end());
    boundary_cells.erase(std::unique(boundary_cells.begin(), boundary_cells.end()),
                         boundary_cells.end());
    for (int idx : boundary_cells) {
        if (bev.walkable[idx]) bev.frustum_edge_cells.push_back(idx);
    }
    return bev;
}

ShadowOccluder build_shadow_occluder(const MaskGrid& shadow_mask, const GroundPlane& plane,
                                     const CameraIntrinsics& intrinsics, const Lighting& lighting,
                                     double plane_height_m, const OccluderOptions& options) {
    if (lighting.mode != LightMode::Directional) {
        throw ValidationError("shadow occluder not applicable: lighting is not directional");
    }
    if (lighting.sun_elevation <= 0.0) {
        throw ValidationError("shadow occluder requires sun above the horizon");
    }
    ShadowOccluder occ;
    occ.plane_height_m = plane_height_m;
    occ.shape.cell_size = options.cell_size_m;

    // Horizontal travel of a sun ray climbing from the ground to height H.
    const double cot = std::cos(lighting.sun_elevation) / std::sin(lighting.sun_elevation);
    const Vec2 shift = sun_bearing_bev(lighting) * (plane_height_m * cot);

    std::vector<Vec2> hits;
    for (int y = 0; y < shadow_mask.height(); ++y) {
        for (int x = 0; x < shadow_mask.width(); ++x) {
            if (!shadow_mask.at(x, y)) continue;
            const auto g = try_pixel_to_ground(x, y, intrinsics, plane);
            if (!g) continue;
            hits.push_back(*g + shift);
        }
    }
    if (hits.empty()) {
        return occ; // empty mask -> empty occluder
    }

    const double cs = occ.shape.cell_size;
    double min_x = hits[0].x, max_x = hits[0].x, min_y = hits[0].y, max_y = hits[0].y;
    for (const Vec2& p : hits) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const int pad = options.closing_radius_cells + 1;
    const long lo_x = static_cast<long>(std::floor(min_x / cs)) - pad;
    const long lo_y = static_cast<long>(std::floor(min_y / cs)) - pad;
    const long hi_x = static_cast<long>(std::floor(max_x / cs)) + pad;
    const long hi_y = static_cast<long>(std::floor(max_y / cs)) + pad;
    occ.shape.origin = {static_cast<double>(lo_x) * cs, static_cast<double>(lo_y) * cs};
    occ.shape.nx = static_cast<int>(hi_x - lo_x + 1);
    occ.shape.ny = static_cast<int>(hi_y - lo_y + 1);

    MaskGrid mask(occ.shape.nx, occ.shape.ny, 0);
    for (const Vec2& p : hits) {
        const auto [ix, iy] = occ.shape.cell_of(p);
        if (occ.shape.in_bounds(ix, iy)) mask.at(ix, iy) = 1;
    }
    // Closing connects the sampled hit points into a solid sheet, standing in
    // for the mesh the points would otherwise be stitched into. Closing is
    // extensive, so every generator cell stays set.
    occ.mask = erode(dilate(mask, options.closing_radius_cells), options.closing_radius_cells);
    return occ;
}

bool is_shadowed(Vec2 bev_point, double height_m, const ShadowOccluder& occluder,
                 const Lighting& lighting) {
    if (lighting.mode != LightMode::Directional || occluder.empty()) return false;
    if (height_m >= occluder.plane_height_m) return false;
    const double cot = std::cos(lighting.sun_elevation) / std::sin(lighting.sun_elevation);
    const Vec2 q =
        bev_point + sun_bearing_bev(lighting) * ((occluder.plane_height_m - height_m) * cot);
    const auto [ix, iy] = occluder.shape.cell_of(q);
    return occluder.shape.in_bounds(ix, iy) && occluder.mask.at(ix, iy) != 0;
}

std::vector<PlaneSample> collect_ground_samples(const LabelRaster& labels, const DepthGrid& depth,
                                                int stride) {
    std::vector<PlaneSample> samples;
    if (stride < 1) stride = 1;
    for (int y = 0; y < labels.height(); y += stride) {
        for (int x = 0; x < labels.width(); x += stride) {
            if (!is_ground_label(labels.at(x, y))) continue;
            const float z = depth.at(x, y);
            if (!std::isfinite(z) || z <= 0.0f) continue;
            samples.push_back({static_cast<double>(x), static_cast<double>(y), z});
        }
    }
    return samples;
}

} // namespace curbside::geometry
