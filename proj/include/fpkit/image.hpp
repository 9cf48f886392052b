#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fpkit {

// 8-bit grayscale raster, row-major. Value 0 is black (ridge ink),
// 255 is white background.
struct GrayImage {
    int width = 0;
    int height = 0;
    int dpi = 500;
    std::vector<uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, uint8_t fill = 255, int dots_per_inch = 500)
        : width(w), height(h), dpi(dots_per_inch),
          pixels(static_cast<size_t>(w) * h, fill) {}

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    uint8_t at(int x, int y) const { return pixels[idx(x, y)]; }
    uint8_t& at(int x, int y) { return pixels[idx(x, y)]; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
};

// Bilinear lookup with clamp-to-edge semantics.
double sample_bilinear(const GrayImage& img, double x, double y);

// Binary raster used between binarization and thinning. bits holds 0/1,
// 1 marks a ridge pixel.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    BinaryImage() = default;
    BinaryImage(int w, int h, uint8_t fill = 0)
        : width(w), height(h), bits(static_cast<size_t>(w) * h, fill) {}

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    uint8_t at(int x, int y) const { return bits[idx(x, y)]; }
    uint8_t& at(int x, int y) { return bits[idx(x, y)]; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    // Out-of-bounds reads count as background.
    uint8_t at_or_zero(int x, int y) const {
        return in_bounds(x, y) ? at(x, y) : uint8_t{0};
    }
};

// Format is picked from the file extension: .png (8-bit grayscale, dpi
// stored in the pHYs chunk) or .pgm (binary P5, maxval 255, no dpi).
void save_image(const GrayImage& img, const std::string& path);
GrayImage load_image(const std::string& path);

}  // namespace fpkit
