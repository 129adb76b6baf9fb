#pragma once

#include <optional>
#include <span>
#include <vector>

#include "curbside/field.hpp"
#include "curbside/raster.hpp"
#include "curbside/scene.hpp"
#include "curbside/vec.hpp"

namespace curbside::geometry {

struct PlaneSample {
    double x_px = 0.0; // image pixel coordinates (origin top-left)
    double y_px = 0.0;
    double z_m = 0.0;  // camera-space depth, meters
};

// Least-squares fit of aX + bY + cZ = 1 from pixel/depth samples using the
// projection identity (a/f)x + (b/f)y + c = 1/Z with center-relative x, y.
// Throws ValidationError on < 3 samples, non-positive depth, or collinear
// (rank-deficient) sample layouts. The near-vertical tilt bound is *not*
// enforced here; scenes reject such planes at validation time.
GroundPlane fit_ground_plane(std::span<const PlaneSample> samples,
                             const CameraIntrinsics& intrinsics);

double plane_fit_residual(const GroundPlane& plane, std::span<const PlaneSample> samples,
                          const CameraIntrinsics& intrinsics);

// True when the plane normal stays within kMaxGroundTiltDeg of the camera up
// axis, i.e. the plane is believable as ground.
bool plane_tilt_ok(const GroundPlane& plane, double max_tilt_deg = kMaxGroundTiltDeg);

// Orthonormal camera-space frame attached to the ground plane. `foot` is the
// point of the plane closest to the camera and doubles as the BEV origin;
// e1/e2 span the plane (e1 ~ camera right, e2 ~ camera forward), `up` points
// from the ground toward the camera side.
struct GroundFrame {
    Vec3 foot;
    Vec3 e1;
    Vec3 e2;
    Vec3 up;

    static GroundFrame from_plane(const GroundPlane& plane);

    Vec3 camera_from_bev(Vec2 bev, double height_m = 0.0) const {
        return foot + bev.x * e1 + bev.y * e2 + height_m * up;
    }
    Vec2 bev_from_camera(Vec3 p) const {
        const Vec3 d = p - foot;
        return {d.dot(e1), d.dot(e2)};
    }
    double height_from_camera(Vec3 p) const { return (p - foot).dot(up); }
};

// Depth of the plane along the ray of an image pixel, or nullopt when the
// ray misses it (horizon or behind the camera).
std::optional<double> plane_depth_at_pixel(double x_px, double y_px,
                                           const CameraIntrinsics& intrinsics,
                                           const GroundPlane& plane);

// Ray/plane intersection expressed in the BEV frame. The try_ variant skips
// non-intersecting pixels; the plain one throws ValidationError("horizon...").
std::optional<Vec2> try_pixel_to_ground(double x_px, double y_px,
                                        const CameraIntrinsics& intrinsics,
                                        const GroundPlane& plane);
Vec2 pixel_to_ground(double x_px, double y_px, const CameraIntrinsics& intrinsics,
                     const GroundPlane& plane);

// Inverse mapping; throws when the point projects behind the camera.
Vec2 ground_to_pixel(Vec2 bev, const CameraIntrinsics& intrinsics, const GroundPlane& plane);

// Pixel position and depth of an arbitrary camera-space point.
std::optional<Vec3> project_camera_point(Vec3 p, const CameraIntrinsics& intrinsics);

// Unit vector from a scene point toward the sun, in camera coordinates.
Vec3 sun_direction_camera(const Lighting& lighting, const GroundFrame& frame);
// Horizontal bearing of the sun in BEV coordinates.
Vec2 sun_bearing_bev(const Lighting& lighting);

enum class SceneClass { PedestrianOnly, Mixed };

// PedestrianOnly iff the Road-pixel fraction is strictly below t_d.
SceneClass classify_scene(const LabelRaster& labels, double drivable_threshold);

// Discretized walkable world for the pedestrian simulation.
struct BevGrid {
    GridShape shape;
    MaskGrid walkable;          // W
    MaskGrid obstacle;          // O; O true implies W false
    Grid<int> component_id;     // per-walkable-cell hull component, -1 elsewhere
    int component_count = 0;
    std::vector<int> frustum_edge_cells; // walkable cells fed by image-boundary pixels

    bool is_walkable(int ix, int iy) const {
        return shape.in_bounds(ix, iy) && walkable.at(ix, iy) != 0;
    }
    bool is_walkable_point(Vec2 p) const {
        const auto [ix, iy] = shape.cell_of(p);
        return is_walkable(ix, iy);
    }
};

struct BevOptions {
    double cell_size_m = 0.25;
    int dilation_radius_cells = 2;   // applied per component before the hull
    int obstacle_radius_cells = 1;   // obstacle footprint disk in O
    double max_range_m = 80.0;       // drop near-horizon projections past this
    bool treat_road_as_walkable = false; // set for PedestrianOnly scenes
};

// Projects walkable labels into BEV, splits them into connected components,
// dilates + convex-hulls each component, and records obstacle ground
// contacts. Throws ValidationError when nothing walkable projects in range.
BevGrid build_bev(const LabelRaster& labels, const GroundPlane& plane,
                  const CameraIntrinsics& intrinsics, const BevOptions& options);

// Monotone-chain convex hull (CCW, collinear points dropped).
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

// Virtual occluder geometry on the plane parallel to the ground at height H.
struct ShadowOccluder {
    double plane_height_m = 3.0; // H
    GridShape shape;
    MaskGrid mask;

    bool empty() const { return mask.size() == 0; }
};

struct OccluderOptions {
    double cell_size_m = 0.25;
    int closing_radius_cells = 2; // dilate+erode to connect sample points
};

// Lifts every shadowed ground pixel along the sun direction onto the plane
// at height H. Directional lighting only.
ShadowOccluder build_shadow_occluder(const MaskGrid& shadow_mask, const GroundPlane& plane,
                                     const CameraIntrinsics& intrinsics, const Lighting& lighting,
                                     double plane_height_m, const OccluderOptions& options = {});

// True iff the ray from (bev_point, height_m) toward the sun crosses a true
// occluder cell.
bool is_shadowed(Vec2 bev_point, double height_m, const ShadowOccluder& occluder,
                 const Lighting& lighting);

// Plane samples for fit_ground_plane: every ground-labeled pixel with finite
// depth, subsampled by `stride` in both directions.
std::vector<PlaneSample> collect_ground_samples(const LabelRaster& labels, const DepthGrid& depth,
                                                int stride = 2);

} // namespace curbside::geometry
