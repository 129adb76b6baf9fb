#pragma once

#include <cstdint>
#include <vector>

#include "curbside/vec.hpp"

namespace curbside {

// Semantic label codes. The numeric values are the on-disk byte codes of
// label rasters, so they must stay stable.
enum class Label : std::uint8_t {
    Road = 0,
    Sidewalk = 1,
    Obstacle = 2,
    Crosswalk = 3,
    Wall = 4,
    Other = 5,
};

inline constexpr std::uint8_t kLabelCount = 6;

inline bool is_ground_label(Label l) {
    return l == Label::Road || l == Label::Sidewalk || l == Label::Crosswalk;
}

// Dense row-major 2D grid. Used both for image rasters (x = column,
// y = row, y down) and for BEV grids (x = lateral, y = forward).
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : w_(width), h_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

    int width() const { return w_; }
    int height() const { return h_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool in_bounds(int x, int y) const { return x >= 0 && x < w_ && y >= 0 && y < h_; }

    T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * w_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * w_ + x]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    int index(int x, int y) const { return y * w_ + x; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    bool operator==(const Grid&) const = default;

private:
    int w_ = 0;
    int h_ = 0;
    std::vector<T> data_;
};

using LabelRaster = Grid<Label>;
using DepthGrid = Grid<float>;     // meters; +inf = sky / unknown
using MaskGrid = Grid<std::uint8_t>;
using ImageF = Grid<Color3f>;      // linear RGB float image

} // namespace curbside
