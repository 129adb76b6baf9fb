#include "curbside/scene.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "curbside/errors.hpp"
#include "curbside/raster_io.hpp"

namespace curbside {

using nlohmann::json;

double Lane::total_length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < centerline.size(); ++i) {
        len += distance(centerline[i - 1], centerline[i]);
    }
    return len;
}

Vec2 Lane::point_at_arc(double s) const {
    if (centerline.size() < 2) return centerline.empty() ? Vec2{} : centerline.front();
    if (s <= 0.0) return centerline.front();
    double walked = 0.0;
    for (std::size_t i = 1; i < centerline.size(); ++i) {
        const double seg = distance(centerline[i - 1], centerline[i]);
        if (walked + seg >= s) {
            const double t = (s - walked) / seg;
            return centerline[i - 1] + t * (centerline[i] - centerline[i - 1]);
        }
        walked += seg;
    }
    return centerline.back();
}

Vec2 Lane::direction_at_arc(double s) const {
    if (centerline.size() < 2) return {1.0, 0.0};
    double walked = 0.0;
    for (std::size_t i = 1; i < centerline.size(); ++i) {
        const double seg = distance(centerline[i - 1], centerline[i]);
        if (walked + seg >= s || i + 1 == centerline.size()) {
            const Vec2 d = centerline[i] - centerline[i - 1];
            return d / d.norm();
        }
        walked += seg;
    }
    const Vec2 d = centerline.back() - centerline[centerline.size() - 2];
    return d / d.norm();
}

namespace {

std::vector<Vec2> ccw_polygon(const std::vector<Vec2>& poly) {
    double area2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 p = poly[i];
        const Vec2 q = poly[(i + 1) % poly.size()];
        area2 += p.cross(q);
    }
    if (area2 >= 0.0) return poly;
    return {poly.rbegin(), poly.rend()};
}

} // namespace

bool point_in_convex_polygon(Vec2 p, const std::vector<Vec2>& poly) {
    if (poly.size() < 3) return false;
    const auto ccw = ccw_polygon(poly);
    constexpr double eps = 1e-9;
    for (std::size_t i = 0; i < ccw.size(); ++i) {
        const Vec2 a = ccw[i];
        const Vec2 b = ccw[(i + 1) % ccw.size()];
        if ((b - a).cross(p - a) < -eps) return false;
    }
    return true;
}

bool ValidationReport::all_ok() const {
    for (const auto& c : checks) {
        if (!c.ok) return false;
    }
    return true;
}

namespace {

void add_check(ValidationReport& rep, const std::string& name, bool ok, std::string detail = "") {
    rep.checks.push_back({name, ok, std::move(detail)});
}

// Arc interval of a lane's centerline inside a convex polygon, or nullopt
// when the lane never enters it. Cyrus-Beck clipping per segment.
std::optional<std::pair<double, double>> lane_polygon_interval(const Lane& lane,
                                                               const std::vector<Vec2>& poly) {
    const auto ccw = ccw_polygon(poly);
    std::optional<std::pair<double, double>> interval;
    double arc_base = 0.0;
    for (std::size_t i = 1; i < lane.centerline.size(); ++i) {
        const Vec2 p = lane.centerline[i - 1];
        const Vec2 q = lane.centerline[i];
        const Vec2 d = q - p;
        const double seg_len = d.norm();
        double t_enter = 0.0;
        double t_exit = 1.0;
        bool rejected = false;
        for (std::size_t e = 0; e < ccw.size() && !rejected; ++e) {
            const Vec2 a = ccw[e];
            const Vec2 b = ccw[(e + 1) % ccw.size()];
            const Vec2 edge = b - a;
            // inside is the left side of each CCW edge
            const double denom = edge.cross(d);
            const double num = edge.cross(p - a);
            if (std::abs(denom) < 1e-12) {
                if (num < 0.0) rejected = true;
            } else {
                const double t = -num / denom;
                if (denom > 0.0) {
                    t_enter = std::max(t_enter, t);
                } else {
                    t_exit = std::min(t_exit, t);
                }
            }
        }
        if (!rejected && t_enter <= t_exit) {
            const double lo = arc_base + t_enter * seg_len;
            const double hi = arc_base + t_exit * seg_len;
            if (!interval) {
                interval = {lo, hi};
            } else {
                interval->first = std::min(interval->first, lo);
                interval->second = std::max(interval->second, hi);
            }
        }
        arc_base += seg_len;
    }
    return interval;
}

bool polygon_is_convex(const std::vector<Vec2>& poly) {
    if (poly.size() < 3) return false;
    int sign = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % poly.size()];
        const Vec2 c = poly[(i + 2) % poly.size()];
        const double cr = (b - a).cross(c - b);
        if (std::abs(cr) < 1e-12) continue;
        const int s = cr > 0.0 ? 1 : -1;
        if (sign == 0) sign = s;
        else if (s != sign) return false;
    }
    return sign != 0;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double area2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        area2 += poly[i].cross(poly[(i + 1) % poly.size()]);
    }
    return 0.5 * std::abs(area2);
}

} // namespace

ValidationReport validate_scene(const SceneDescription& scene) {
    ValidationReport rep;
    const auto& cam = scene.camera;

    add_check(rep, "focal_length_px", cam.focal_length_px > 0.0,
              "focal_length_px must be > 0");
    add_check(rep, "image_dims", cam.width_px >= 16 && cam.height_px >= 16,
              "width_px and height_px must be >= 16");

    auto dims_match = [&](int w, int h) { return w == cam.width_px && h == cam.height_px; };
    add_check(rep, "raster_dims_labels", dims_match(scene.labels.width(), scene.labels.height()),
              "labels raster dimensions do not match camera");
    add_check(rep, "raster_dims_depth", dims_match(scene.depth.width(), scene.depth.height()),
              "depth raster dimensions do not match camera");
    add_check(rep, "raster_dims_shadow_mask",
              dims_match(scene.shadow_mask.width(), scene.shadow_mask.height()),
              "shadow_mask raster dimensions do not match camera");
    add_check(rep, "raster_dims_background",
              dims_match(scene.background.width(), scene.background.height()),
              "background raster dimensions do not match camera");

    bool depth_ok = true;
    for (std::size_t i = 0; i < scene.depth.size() && depth_ok; ++i) {
        const float d = scene.depth[i];
        if (std::isnan(d) || (std::isfinite(d) && d <= 0.0f)) depth_ok = false;
    }
    add_check(rep, "depth_values", depth_ok, "finite depth values must be > 0 (no NaN)");

    const auto& L = scene.lighting;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr double half_pi = 0.5 * std::numbers::pi;
    add_check(rep, "sun_azimuth", L.sun_azimuth >= 0.0 && L.sun_azimuth < two_pi,
              "sun_azimuth must be in [0, 2pi)");
    const bool elev_ok = L.mode == LightMode::Directional
                             ? (L.sun_elevation > 0.0 && L.sun_elevation <= half_pi)
                             : (L.sun_elevation >= 0.0 && L.sun_elevation <= half_pi);
    add_check(rep, "sun_elevation", elev_ok,
              "directional lighting requires sun_elevation in (0, pi/2]");
    add_check(rep, "light_intensities",
              L.directional_intensity >= 0.0 && L.ambient_intensity >= 0.0,
              "light intensities must be non-negative");

    add_check(rep, "drivable_threshold",
              scene.drivable_threshold > 0.0 && scene.drivable_threshold < 1.0,
              "drivable_threshold must be in (0, 1)");

    bool shadow_on_ground = true;
    if (scene.shadow_mask.size() == scene.labels.size()) {
        for (std::size_t i = 0; i < scene.shadow_mask.size(); ++i) {
            if (scene.shadow_mask[i] && !is_ground_label(scene.labels[i])) {
                shadow_on_ground = false;
                break;
            }
        }
    }
    add_check(rep, "shadow_mask_on_ground", shadow_on_ground,
              "shadow mask must be limited to Road/Sidewalk/Crosswalk pixels");

    for (std::size_t li = 0; li < scene.lanes.size(); ++li) {
        const Lane& lane = scene.lanes[li];
        const std::string tag = "lane_" + std::to_string(li);
        bool pts_ok = lane.centerline.size() >= 2;
        for (std::size_t i = 1; i < lane.centerline.size() && pts_ok; ++i) {
            if (distance(lane.centerline[i - 1], lane.centerline[i]) <= 0.0) pts_ok = false;
        }
        add_check(rep, tag + "_centerline", pts_ok,
                  "lane centerline needs >= 2 distinct consecutive points");
        add_check(rep, tag + "_width", lane.width_m > 0.0, "lane width_m must be > 0");
    }

    for (std::size_t ci = 0; ci < scene.crosswalks.size(); ++ci) {
        const Crosswalk& cw = scene.crosswalks[ci];
        const std::string tag = "crosswalk_" + std::to_string(ci);
        add_check(rep, tag + "_polygon",
                  cw.bev_polygon.size() >= 3 && polygon_is_convex(cw.bev_polygon) &&
                      polygon_area(cw.bev_polygon) > 1e-9,
                  "crosswalk polygon must be convex and non-degenerate");
        if (cw.schedule) {
            add_check(rep, tag + "_schedule",
                      cw.schedule->green_for_cars_s > 0.0 && cw.schedule->green_for_peds_s > 0.0,
                      "traffic light phase durations must be > 0");
        }
        for (const CrosswalkStop& stop : cw.stops) {
            const std::string stag = tag + "_stop_lane" + std::to_string(stop.lane_index);
            if (stop.lane_index < 0 || stop.lane_index >= static_cast<int>(scene.lanes.size())) {
                add_check(rep, stag, false, "stop references a missing lane");
                continue;
            }
            const Lane& lane = scene.lanes[stop.lane_index];
            const auto interval = lane_polygon_interval(lane, cw.bev_polygon);
            const bool ok = interval && stop.stop_arc >= 0.0 && stop.stop_arc < interval->first;
            add_check(rep, stag, ok,
                      "stop_arc must lie strictly before the lane's crosswalk interval");
        }
    }

    return rep;
}

namespace {

json vec2_list_to_json(const std::vector<Vec2>& pts) {
    json arr = json::array();
    for (const Vec2& p : pts) arr.push_back(json::array({p.x, p.y}));
    return arr;
}

std::vector<Vec2> vec2_list_from_json(const json& arr, const std::string& what) {
    if (!arr.is_array()) throw ValidationError("scenario field " + what + " must be an array");
    std::vector<Vec2> pts;
    pts.reserve(arr.size());
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2) {
            throw ValidationError("scenario field " + what + " must hold [x, y] pairs");
        }
        pts.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return pts;
}

} // namespace

SceneDescription load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scenario file: " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("parse error in " + path.string() + ": " + e.what());
    }

    SceneDescription scene;
    try {
        if (doc.value("curbside_scenario", 0) != 1) {
            throw ValidationError("unsupported scenario version in " + path.string());
        }
        const json& cam = doc.at("camera");
        scene.camera.focal_length_px = cam.at("focal_length_px").get<double>();
        scene.camera.width_px = cam.at("width_px").get<int>();
        scene.camera.height_px = cam.at("height_px").get<int>();

        const json& light = doc.at("lighting");
        const std::string mode = light.at("mode").get<std::string>();
        if (mode == "directional") scene.lighting.mode = LightMode::Directional;
        else if (mode == "diffuse") scene.lighting.mode = LightMode::Diffuse;
        else throw ValidationError("lighting.mode must be 'directional' or 'diffuse'");
        scene.lighting.sun_azimuth = light.at("sun_azimuth_rad").get<double>();
        scene.lighting.sun_elevation = light.at("sun_elevation_rad").get<double>();
        scene.lighting.directional_intensity = light.at("directional_intensity").get<double>();
        scene.lighting.ambient_intensity = light.at("ambient_intensity").get<double>();

        scene.drivable_threshold = doc.at("drivable_threshold").get<double>();

        const json& rasters = doc.at("rasters");
        const auto base = path.parent_path();
        scene.labels = read_label_raster(base / rasters.at("labels").get<std::string>());
        scene.depth = read_depth_raster(base / rasters.at("depth").get<std::string>());
        scene.shadow_mask = read_mask_raster(base / rasters.at("shadow_mask").get<std::string>());
        scene.background = read_rgb_image(base / rasters.at("background").get<std::string>());

        for (const auto& jl : doc.value("lanes", json::array())) {
            Lane lane;
            lane.width_m = jl.at("width_m").get<double>();
            lane.centerline = vec2_list_from_json(jl.at("centerline"), "lane.centerline");
            scene.lanes.push_back(std::move(lane));
        }
        for (const auto& jc : doc.value("crosswalks", json::array())) {
            Crosswalk cw;
            cw.bev_polygon = vec2_list_from_json(jc.at("polygon"), "crosswalk.polygon");
            for (const auto& js : jc.value("stops", json::array())) {
                cw.stops.push_back({js.at("lane").get<int>(), js.at("arc").get<double>()});
            }
            if (jc.contains("schedule")) {
                TrafficLightCycle cyc;
                cyc.green_for_cars_s = jc["schedule"].at("green_for_cars_s").get<double>();
                cyc.green_for_peds_s = jc["schedule"].at("green_for_peds_s").get<double>();
                cyc.offset_s = jc["schedule"].value("offset_s", 0.0);
                cw.schedule = cyc;
            }
            scene.crosswalks.push_back(std::move(cw));
        }
    } catch (const json::exception& e) {
        throw ValidationError("malformed scenario " + path.string() + ": " + e.what());
    }

    // Shadow mask is defined on ground only; clear anything else.
    if (scene.shadow_mask.size() == scene.labels.size()) {
        for (std::size_t i = 0; i < scene.shadow_mask.size(); ++i) {
            if (scene.shadow_mask[i] && !is_ground_label(scene.labels[i])) {
                scene.shadow_mask[i] = 0;
            }
        }
    }

    const ValidationReport rep = validate_scene(scene);
    for (const auto& check : rep.checks) {
        if (!check.ok) {
            throw ValidationError("scenario invariant violated: " + check.name + " (" +
                                  check.detail + ")");
        }
    }
    return scene;
}

void save_scene(const SceneDescription& scene, const std::filesystem::path& path) {
    const auto dir = path.parent_path();
    const std::string stem = path.stem().string();
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
    }

    const std::string labels_name = stem + "_labels.svr";
    const std::string depth_name = stem + "_depth.svr";
    const std::string shadow_name = stem + "_shadow.svr";
    const std::string background_name = stem + "_background.ppm";

    write_label_raster(dir / labels_name, scene.labels);
    write_depth_raster(dir / depth_name, scene.depth);
    write_mask_raster(dir / shadow_name, scene.shadow_mask);
    write_ppm(dir / background_name, scene.background);

    json doc;
    doc["curbside_scenario"] = 1;
    doc["camera"] = {{"focal_length_px", scene.camera.focal_length_px},
                     {"width_px", scene.camera.width_px},
                     {"height_px", scene.camera.height_px}};
    doc["lighting"] = {
        {"mode", scene.lighting.mode == LightMode::Directional ? "directional" : "diffuse"},
        {"sun_azimuth_rad", scene.lighting.sun_azimuth},
        {"sun_elevation_rad", scene.lighting.sun_elevation},
        {"directional_intensity", scene.lighting.directional_intensity},
        {"ambient_intensity", scene.lighting.ambient_intensity}};
    doc["drivable_threshold"] = scene.drivable_threshold;
    doc["rasters"] = {{"labels", labels_name},
                      {"depth", depth_name},
                      {"shadow_mask", shadow_name},
                      {"background", background_name}};
    doc["lanes"] = json::array();
    for (const Lane& lane : scene.lanes) {
        doc["lanes"].push_back(
            {{"width_m", lane.width_m}, {"centerline", vec2_list_to_json(lane.centerline)}});
    }
    doc["crosswalks"] = json::array();
    for (const Crosswalk& cw : scene.crosswalks) {
        json jc = {{"polygon", vec2_list_to_json(cw.bev_polygon)}};
        jc["stops"] = json::array();
        for (const CrosswalkStop& stop : cw.stops) {
            jc["stops"].push_back({{"lane", stop.lane_index}, {"arc", stop.stop_arc}});
        }
        if (cw.schedule) {
            jc["schedule"] = {{"green_for_cars_s", cw.schedule->green_for_cars_s},
                              {"green_for_peds_s", cw.schedule->green_for_peds_s},
                              {"offset_s", cw.schedule->offset_s}};
        }
        doc["crosswalks"].push_back(std::move(jc));
    }

    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open scenario file for writing: " + path.string());
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw IoError("short write: " + path.string());
    }
}

} // namespace curbside
