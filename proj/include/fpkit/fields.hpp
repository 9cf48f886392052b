#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace fpkit {

namespace detail {
inline int block_of(int pixel, int block_size, int count) {
    return std::clamp(pixel / block_size, 0, count - 1);
}
}  // namespace detail

// Per-block ridge orientation in [0, pi) plus a coherence weight in [0, 1].
// Orientation is undirected: theta and theta + pi describe the same ridge flow.
struct OrientationField {
    int block_size = 16;
    int cols = 0;
    int rows = 0;
    std::vector<double> theta;
    std::vector<double> coherence;

    OrientationField() = default;
    OrientationField(int c, int r, int bs)
        : block_size(bs), cols(c), rows(r),
          theta(static_cast<size_t>(c) * r, 0.0),
          coherence(static_cast<size_t>(c) * r, 0.0) {}

    size_t idx(int bx, int by) const { return static_cast<size_t>(by) * cols + bx; }
    double theta_at(int bx, int by) const { return theta[idx(bx, by)]; }
    double coherence_at(int bx, int by) const { return coherence[idx(bx, by)]; }

    double theta_at_pixel(int x, int y) const {
        return theta_at(detail::block_of(x, block_size, cols),
                        detail::block_of(y, block_size, rows));
    }
    double coherence_at_pixel(int x, int y) const {
        return coherence_at(detail::block_of(x, block_size, cols),
                            detail::block_of(y, block_size, rows));
    }
};

// Per-block ridge frequency in cycles/pixel; 0 marks blocks where no
// estimate was possible.
struct FrequencyMap {
    int block_size = 16;
    int cols = 0;
    int rows = 0;
    std::vector<double> freq;

    FrequencyMap() = default;
    FrequencyMap(int c, int r, int bs)
        : block_size(bs), cols(c), rows(r), freq(static_cast<size_t>(c) * r, 0.0) {}

    size_t idx(int bx, int by) const { return static_cast<size_t>(by) * cols + bx; }
    double at(int bx, int by) const { return freq[idx(bx, by)]; }
    bool has(int bx, int by) const { return at(bx, by) > 0.0; }

    double at_pixel(int x, int y) const {
        return at(detail::block_of(x, block_size, cols),
                  detail::block_of(y, block_size, rows));
    }

    // Mean over blocks with an estimate; fallback when none have one.
    double mean_present(double fallback) const {
        double sum = 0.0;
        size_t n = 0;
        for (double f : freq)
            if (f > 0.0) { sum += f; ++n; }
        return n > 0 ? sum / n : fallback;
    }
};

// Per-block foreground flag (1 = fingerprint area).
struct ForegroundMask {
    int block_size = 16;
    int cols = 0;
    int rows = 0;
    std::vector<uint8_t> fg;

    ForegroundMask() = default;
    ForegroundMask(int c, int r, int bs)
        : block_size(bs), cols(c), rows(r), fg(static_cast<size_t>(c) * r, 0) {}

    size_t idx(int bx, int by) const { return static_cast<size_t>(by) * cols + bx; }
    bool is_fg(int bx, int by) const { return fg[idx(bx, by)] != 0; }
    bool is_fg_pixel(int x, int y) const {
        return is_fg(detail::block_of(x, block_size, cols),
                     detail::block_of(y, block_size, rows));
    }

    size_t fg_block_count() const {
        size_t n = 0;
        for (uint8_t v : fg) n += (v != 0);
        return n;
    }

    // Foreground pixel area with blocks clipped to the image bounds.
    int64_t pixel_area(int image_w, int image_h) const {
        int64_t area = 0;
        for (int by = 0; by < rows; ++by) {
            int h = std::min(block_size, image_h - by * block_size);
            if (h <= 0) continue;
            for (int bx = 0; bx < cols; ++bx) {
                if (!is_fg(bx, by)) continue;
                int w = std::min(block_size, image_w - bx * block_size);
                if (w > 0) area += static_cast<int64_t>(w) * h;
            }
        }
        return area;
    }
};

// One-pixel-wide ridge skeleton; bits holds 0/1 with 1 = ridge.
struct Skeleton {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    Skeleton() = default;
    Skeleton(int w, int h)
        : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    uint8_t at(int x, int y) const { return bits[idx(x, y)]; }
    uint8_t& at(int x, int y) { return bits[idx(x, y)]; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    uint8_t at_or_zero(int x, int y) const {
        return in_bounds(x, y) ? at(x, y) : uint8_t{0};
    }
};

}  // namespace fpkit
