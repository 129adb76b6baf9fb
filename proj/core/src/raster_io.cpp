#include "curbside/raster_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "curbside/errors.hpp"

namespace curbside {

namespace {

constexpr char kMagic[4] = {'S', 'V', 'R', '1'};

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path.string());
    }
    in.seekg(0, std::ios::end);
    const auto len = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(len);
    if (len > 0) {
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(len));
    }
    if (!in) {
        throw IoError("short read: " + path.string());
    }
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open file for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("short write: " + path.string());
    }
}

float f32_from_le_bytes(const std::uint8_t* p) {
    std::uint32_t bits = get_u32_le(p);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

void put_f32_le(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    put_u32_le(out, bits);
}

} // namespace

SvrRaster read_svr(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() < 14 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw IoError("not an SVR1 raster: " + path.string());
    }
    SvrRaster r;
    r.width = get_u32_le(bytes.data() + 4);
    r.height = get_u32_le(bytes.data() + 8);
    r.channels = bytes[12];
    const std::uint8_t dtype = bytes[13];
    if (dtype > 1) {
        throw IoError("unknown SVR1 dtype tag: " + path.string());
    }
    r.dtype = static_cast<SvrRaster::Dtype>(dtype);
    if (r.channels == 0) {
        throw IoError("SVR1 raster with zero channels: " + path.string());
    }
    const std::size_t values = r.pixel_count() * r.channels;
    const std::size_t value_size = r.dtype == SvrRaster::Dtype::U8 ? 1 : 4;
    if (bytes.size() != 14 + values * value_size) {
        throw IoError("SVR1 payload size mismatch: " + path.string());
    }
    if (r.dtype == SvrRaster::Dtype::U8) {
        r.u8.assign(bytes.begin() + 14, bytes.end());
    } else {
        r.f32.resize(values);
        for (std::size_t i = 0; i < values; ++i) {
            r.f32[i] = f32_from_le_bytes(bytes.data() + 14 + i * 4);
        }
    }
    return r;
}

void write_svr(const std::filesystem::path& path, const SvrRaster& raster) {
    std::vector<std::uint8_t> bytes;
    const std::size_t values = raster.pixel_count() * raster.channels;
    bytes.reserve(14 + values * (raster.dtype == SvrRaster::Dtype::U8 ? 1 : 4));
    bytes.insert(bytes.end(), kMagic, kMagic + 4);
    put_u32_le(bytes, raster.width);
    put_u32_le(bytes, raster.height);
    bytes.push_back(raster.channels);
    bytes.push_back(static_cast<std::uint8_t>(raster.dtype));
    if (raster.dtype == SvrRaster::Dtype::U8) {
        if (raster.u8.size() != values) {
            throw ValidationError("SVR1 u8 payload size mismatch on write");
        }
        bytes.insert(bytes.end(), raster.u8.begin(), raster.u8.end());
    } else {
        if (raster.f32.size() != values) {
            throw ValidationError("SVR1 f32 payload size mismatch on write");
        }
        for (float f : raster.f32) {
            put_f32_le(bytes, f);
        }
    }
    write_file_bytes(path, bytes);
}

LabelRaster read_label_raster(const std::filesystem::path& path) {
    const SvrRaster r = read_svr(path);
    if (r.dtype != SvrRaster::Dtype::U8 || r.channels != 1) {
        throw ValidationError("label raster must be 1-channel u8: " + path.string());
    }
    LabelRaster labels(static_cast<int>(r.width), static_cast<int>(r.height));
    for (std::size_t i = 0; i < r.u8.size(); ++i) {
        if (r.u8[i] >= kLabelCount) {
            throw ValidationError("label raster has out-of-range code " +
                                  std::to_string(int(r.u8[i])) + ": " + path.string());
        }
        labels[i] = static_cast<Label>(r.u8[i]);
    }
    return labels;
}

void write_label_raster(const std::filesystem::path& path, const LabelRaster& labels) {
    SvrRaster r;
    r.width = static_cast<std::uint32_t>(labels.width());
    r.height = static_cast<std::uint32_t>(labels.height());
    r.channels = 1;
    r.dtype = SvrRaster::Dtype::U8;
    r.u8.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        r.u8[i] = static_cast<std::uint8_t>(labels[i]);
    }
    write_svr(path, r);
}

DepthGrid read_depth_raster(const std::filesystem::path& path) {
    const SvrRaster r = read_svr(path);
    if (r.dtype != SvrRaster::Dtype::F32 || r.channels != 1) {
        throw ValidationError("depth raster must be 1-channel f32: " + path.string());
    }
    DepthGrid depth(static_cast<int>(r.width), static_cast<int>(r.height));
    for (std::size_t i = 0; i < r.f32.size(); ++i) {
        depth[i] = r.f32[i];
    }
    return depth;
}

void write_depth_raster(const std::filesystem::path& path, const DepthGrid& depth) {
    SvrRaster r;
    r.width = static_cast<std::uint32_t>(depth.width());
    r.height = static_cast<std::uint32_t>(depth.height());
    r.channels = 1;
    r.dtype = SvrRaster::Dtype::F32;
    r.f32 = depth.data();
    write_svr(path, r);
}

MaskGrid read_mask_raster(const std::filesystem::path& path) {
    const SvrRaster r = read_svr(path);
    if (r.dtype != SvrRaster::Dtype::U8 || r.channels != 1) {
        throw ValidationError("mask raster must be 1-channel u8: " + path.string());
    }
    MaskGrid mask(static_cast<int>(r.width), static_cast<int>(r.height));
    for (std::size_t i = 0; i < r.u8.size(); ++i) {
        mask[i] = r.u8[i] != 0 ? 1 : 0;
    }
    return mask;
}

void write_mask_raster(const std::filesystem::path& path, const MaskGrid& mask) {
    SvrRaster r;
    r.width = static_cast<std::uint32_t>(mask.width());
    r.height = static_cast<std::uint32_t>(mask.height());
    r.channels = 1;
    r.dtype = SvrRaster::Dtype::U8;
    r.u8 = mask.data();
    write_svr(path, r);
}

void write_scalar_raster(const std::filesystem::path& path, int width, int height,
                         const std::vector<double>& values) {
    SvrRaster r;
    r.width = static_cast<std::uint32_t>(width);
    r.height = static_cast<std::uint32_t>(height);
    r.channels = 1;
    r.dtype = SvrRaster::Dtype::F32;
    r.f32.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        r.f32[i] = static_cast<float>(values[i]);
    }
    write_svr(path, r);
}

std::uint8_t quantize_channel(float v) {
    float scaled = std::round(v * 255.0f);
    if (scaled < 0.0f) scaled = 0.0f;
    if (scaled > 255.0f) scaled = 255.0f;
    return static_cast<std::uint8_t>(scaled);
}

namespace {

ImageF rgb_from_svr(const SvrRaster& r, const std::filesystem::path& path) {
    if (r.channels != 3 || r.dtype != SvrRaster::Dtype::U8) {
        throw ValidationError("RGB raster must be 3-channel u8: " + path.string());
    }
    ImageF img(static_cast<int>(r.width), static_cast<int>(r.height));
    for (std::size_t i = 0; i < img.size(); ++i) {
        img[i] = Color3f{r.u8[3 * i] / 255.0f, r.u8[3 * i + 1] / 255.0f, r.u8[3 * i + 2] / 255.0f};
    }
    return img;
}

ImageF read_ppm(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    std::size_t pos = 2; // past "P6"
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() -> long {
        skip_space();
        long v = 0;
        bool any = false;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
            any = true;
        }
        if (!any) throw IoError("malformed PPM header: " + path.string());
        return v;
    };
    const long w = read_int();
    const long h = read_int();
    const long maxval = read_int();
    if (maxval != 255) {
        throw IoError("PPM maxval must be 255: " + path.string());
    }
    ++pos; // single whitespace after maxval
    const std::size_t need = static_cast<std::size_t>(w) * h * 3;
    if (bytes.size() - pos < need) {
        throw IoError("PPM payload truncated: " + path.string());
    }
    ImageF img(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < img.size(); ++i) {
        img[i] = Color3f{bytes[pos + 3 * i] / 255.0f, bytes[pos + 3 * i + 1] / 255.0f,
                         bytes[pos + 3 * i + 2] / 255.0f};
    }
    return img;
}

} // namespace

ImageF read_rgb_image(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
        return read_ppm(path);
    }
    return rgb_from_svr(read_svr(path), path);
}

void write_ppm(const std::filesystem::path& path, const ImageF& image) {
    std::vector<std::uint8_t> bytes;
    const std::string header =
        "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    bytes.insert(bytes.end(), header.begin(), header.end());
    bytes.reserve(bytes.size() + image.size() * 3);
    for (std::size_t i = 0; i < image.size(); ++i) {
        bytes.push_back(quantize_channel(image[i].r));
        bytes.push_back(quantize_channel(image[i].g));
        bytes.push_back(quantize_channel(image[i].b));
    }
    write_file_bytes(path, bytes);
}

} // namespace curbside
