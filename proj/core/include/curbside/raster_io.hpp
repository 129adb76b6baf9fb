#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "curbside/raster.hpp"

namespace curbside {

// SVR1 raster container: 4-byte magic "SVR1", u32 LE width, u32 LE height,
// u8 channel count, u8 dtype (0 = u8, 1 = f32), then the row-major payload
// with channels interleaved per pixel. f32 payloads are little-endian IEEE;
// +inf is a legal value.
struct SvrRaster {
    enum class Dtype : std::uint8_t { U8 = 0, F32 = 1 };

    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint8_t channels = 0;
    Dtype dtype = Dtype::U8;
    std::vector<std::uint8_t> u8;   // filled when dtype == U8
    std::vector<float> f32;        // filled when dtype == F32

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }
};

SvrRaster read_svr(const std::filesystem::path& path);
void write_svr(const std::filesystem::path& path, const SvrRaster& raster);

// Typed conveniences over SvrRaster.
LabelRaster read_label_raster(const std::filesystem::path& path);
void write_label_raster(const std::filesystem::path& path, const LabelRaster& labels);

DepthGrid read_depth_raster(const std::filesystem::path& path);
void write_depth_raster(const std::filesystem::path& path, const DepthGrid& depth);

MaskGrid read_mask_raster(const std::filesystem::path& path);
void write_mask_raster(const std::filesystem::path& path, const MaskGrid& mask);

void write_scalar_raster(const std::filesystem::path& path, int width, int height,
                         const std::vector<double>& values);

// RGB images: binary PPM (P6, maxval 255) or a 3-channel u8 SVR raster,
// decided by file content (PPM) / extension. Float channels are quantized
// with round-to-nearest; u8 -> float -> u8 round-trips exactly.
ImageF read_rgb_image(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const ImageF& image);

std::uint8_t quantize_channel(float v);

} // namespace curbside
