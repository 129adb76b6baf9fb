#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "curbside/raster.hpp"
#include "curbside/vec.hpp"

namespace curbside {

struct CameraIntrinsics {
    double focal_length_px = 0.0;
    int width_px = 0;
    int height_px = 0;

    // Principal point is fixed at the image center.
    double cx() const { return 0.5 * (width_px - 1); }
    double cy() const { return 0.5 * (height_px - 1); }
};

// Ground plane aX + bY + cZ = 1 in camera coordinates (X right, Y down,
// Z forward; units 1/meters). For a level camera h meters above flat
// ground this is (0, 1/h, 0).
struct GroundPlane {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

enum class LightMode { Directional, Diffuse };

struct Lighting {
    LightMode mode = LightMode::Diffuse;
    double sun_azimuth = 0.0;    // radians, [0, 2pi); bearing of the sun in BEV
    double sun_elevation = 0.0;  // radians, (0, pi/2]; pi/2 = zenith
    double directional_intensity = 0.0;
    double ambient_intensity = 1.0;
};

struct Lane {
    std::vector<Vec2> centerline; // BEV meters, ordered
    double width_m = 3.5;

    double total_length() const;
    Vec2 point_at_arc(double s) const;
    Vec2 direction_at_arc(double s) const; // unit vector of the segment at s
};

struct TrafficLightCycle {
    double green_for_cars_s = 0.0;
    double green_for_peds_s = 0.0;
    double offset_s = 0.0;
};

struct CrosswalkStop {
    int lane_index = 0;
    double stop_arc = 0.0; // arc-length on that lane, strictly before the polygon
};

struct Crosswalk {
    std::vector<Vec2> bev_polygon; // convex, CCW or CW
    std::vector<CrosswalkStop> stops;
    std::optional<TrafficLightCycle> schedule; // absent = always green for cars
};

struct SceneDescription {
    CameraIntrinsics camera;
    LabelRaster labels;
    DepthGrid depth;
    Lighting lighting;
    MaskGrid shadow_mask;       // true where the input image is shadowed ground
    std::vector<Lane> lanes;
    std::vector<Crosswalk> crosswalks;
    ImageF background;          // B
    double drivable_threshold = 0.05; // t_d, fraction of image pixels
};

// Loads a scenario file (JSON text + sidecar rasters next to it), validates
// every type invariant and intersects the shadow mask with ground labels.
// Throws ValidationError naming the first violated invariant, or IoError.
SceneDescription load_scene(const std::filesystem::path& path);

// Writes the scenario back out; sidecars land next to `path` using its stem
// as a prefix. load_scene(save_scene(s)) reproduces s field-for-field.
void save_scene(const SceneDescription& scene, const std::filesystem::path& path);

// Runs all invariant checks, accumulating (name, ok, detail) rows; used by
// load_scene (throws on the first failure) and by the validate command.
struct ValidationReport {
    struct Check {
        std::string name;
        bool ok = false;
        std::string detail;
    };
    std::vector<Check> checks;
    bool all_ok() const;
};

ValidationReport validate_scene(const SceneDescription& scene);

// Max allowed angle between the ground normal and the camera up axis.
inline constexpr double kMaxGroundTiltDeg = 75.0;

bool point_in_convex_polygon(Vec2 p, const std::vector<Vec2>& poly);

} // namespace curbside
