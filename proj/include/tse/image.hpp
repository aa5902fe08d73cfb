#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace tse {

/// Raised for unreadable, unwritable or malformed raster files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major grayscale raster with intensities in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Row-major boolean raster, typically a ground-truth tumor mask.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill ? 1 : 0) {}

    std::size_t size() const { return data.size(); }
    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const;
};

/// Quantizes an intensity to a byte with round-half-up, clamping to [0,255].
std::uint8_t to_byte(double v);

/// Loads an 8-bit grayscale PGM (P2/P5) or PNG; bytes map to v/255.
GrayImage load_image(const std::filesystem::path& path);

/// Writes 8-bit grayscale; the format follows the extension (.png, otherwise PGM).
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// Loads a grayscale file as a mask: a pixel is set iff its byte is >= 128.
BinaryMask load_mask(const std::filesystem::path& path);

void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Writes a 16-bit binary PGM (values clipped at 65535). Used for label dumps.
void save_pgm16(int width, int height, const std::vector<int>& values, const std::filesystem::path& path);

/// Raw 8-bit decode, shared by load_image and load_mask.
struct ByteRaster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bytes;
};
ByteRaster read_bytes(const std::filesystem::path& path);
void write_bytes(const ByteRaster& raster, const std::filesystem::path& path);

}  // namespace tse
