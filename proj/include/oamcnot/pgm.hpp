#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oamcnot/array2d.hpp"

namespace oamcnot {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::filesystem::path& path, const std::string& what)
        : std::runtime_error(what + ": " + path.string()), path_(path) {}
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// 16-bit samples scaled so the image maximum maps to 65535, rounding half up.
/// An all-zero image stays all zero.
inline std::vector<std::uint16_t> quantize_16bit(const Array2D<double>& img) {
    double vmax = 0.0;
    for (double v : img.values()) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("image samples must be finite and non-negative");
        }
        vmax = std::max(vmax, v);
    }
    std::vector<std::uint16_t> out(img.count(), 0);
    if (vmax == 0.0) return out;
    auto src = img.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double scaled = std::floor(src[i] / vmax * 65535.0 + 0.5);
        out[i] = static_cast<std::uint16_t>(std::clamp(scaled, 0.0, 65535.0));
    }
    return out;
}

/// Binary PGM: "P5\n<w> <h>\n65535\n" then big-endian 16-bit samples, row 0 first.
inline void write_image(const Array2D<double>& img, const std::filesystem::path& path) {
    const auto samples = quantize_16bit(img);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(path, "cannot open image for writing");
    const std::string header =
        "P5\n" + std::to_string(img.size()) + " " + std::to_string(img.size()) + "\n65535\n";
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::vector<char> bytes(samples.size() * 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        bytes[2 * i] = static_cast<char>(samples[i] >> 8);
        bytes[2 * i + 1] = static_cast<char>(samples[i] & 0xFF);
    }
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError(path, "failed writing image");
}

/// Raw little-endian float64 dump, row-major, no header.
inline void write_raw_float(const Array2D<double>& img, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(path, "cannot open raw dump for writing");
    std::vector<char> bytes(img.count() * 8);
    auto src = img.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof(double));
        std::memcpy(&bits, &src[i], 8);
        for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError(path, "failed writing raw dump");
}

}  // namespace oamcnot
