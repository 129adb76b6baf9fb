#pragma once

#include <cmath>

namespace curbside {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::sqrt(x * x + y * y); }
    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(Vec3 o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 normalized() const { double n = norm(); return {x / n, y / n, z / n}; }
    bool operator==(const Vec3&) const = default;
};

inline Vec3 operator*(double s, Vec3 v) { return v * s; }

// Linear RGB, components nominally in [0, 1].
struct Color3f {
    float r = 0.0f;
    float g = 0.0f;
    float b = 0.0f;

    Color3f operator*(float s) const { return {r * s, g * s, b * s}; }
    Color3f operator*(Color3f o) const { return {r * o.r, g * o.g, b * o.b}; }
    Color3f operator+(Color3f o) const { return {r + o.r, g + o.g, b + o.b}; }
    bool operator==(const Color3f&) const = default;
};

} // namespace curbside
