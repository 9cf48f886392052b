#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fpkit/fields.hpp"
#include "fpkit/image.hpp"
#include "fpkit/rng.hpp"

namespace fpkit {

enum class FingerClass { arch, left_loop, right_loop, whorl };

struct SynthParams {
    uint64_t seed = 0;
    std::optional<FingerClass> finger_class;  // unset = drawn uniformly
    int width = 512;
    int height = 512;
    int dpi = 500;
    double ridge_period_min = 6.0;  // px
    double ridge_period_max = 12.0;
    std::optional<int> crease_count;  // unset = drawn 0..4 per impression
    double pressure = 1.0;            // [0.5, 1.5]
    double noise_sigma = 0.05;        // multiplicative sensor noise, 0 = off
};

// Plain-impression silhouette: a centered rectangle capped by four
// quarter-ellipses (left/right half-widths may differ).
struct FingerShape {
    double cx = 0, cy = 0;
    double half_left = 0, half_right = 0;
    double band_half = 0;                // straight mid-band half-height
    double top_axis = 0, bottom_axis = 0;  // vertical semi-axes of the caps

    bool contains(double x, double y) const;
    // True when the whole disc of the given radius stays inside.
    bool contains_with_margin(double x, double y, double margin) const;
};

struct SingularityLayout {
    FingerClass finger_class = FingerClass::arch;
    FingerShape shape;
    std::vector<std::pair<double, double>> cores;
    std::vector<std::pair<double, double>> deltas;
    double theta0 = 0.0;
    // Arch-class field parameters (no singular points).
    double arch_amp = 1.0;
    double arch_sigma = 90.0;
    double arch_drop = 20.0;
};

SingularityLayout sample_layout(const SynthParams& params, Rng& rng);

// Zero-pole orientation model over block centers:
//   theta(z) = theta0 + 1/2 [sum arg(z - core) - sum arg(z - delta)]  (mod pi)
// The arch class instead bends a horizontal field by an atan-of-sinusoid
// profile. Coherence is 1 inside the silhouette, 0 outside.
OrientationField build_orientation(const SingularityLayout& layout, int width,
                                   int height, int block_size = 16);

// Block mask of the silhouette (block center inside the shape).
ForegroundMask shape_mask(const FingerShape& shape, int width, int height,
                          int block_size = 16);

// Iterative space-variant Gabor growth: foreground starts flat with a few
// random dark seeds and is filtered repeatedly (soft-clipped) until the
// ridge pattern stabilizes or max_passes is hit.
GrayImage grow_ridges(const OrientationField& of, const FrequencyMap& fm,
                      const ForegroundMask& mask, int width, int height, Rng& rng,
                      int max_passes = 30);

struct ImpressionSpec {
    double rotation_deg = 0.0;
    double dx = 0.0, dy = 0.0;
    double pressure = 1.0;
    int crease_count = 0;
    double noise_sigma = 0.05;
    uint64_t seed = 0;  // crease placement and sensor noise streams
};

// Plain-impression rendering: rigid placement, pressure morphology, white
// creases aligned with the local ridge flow, multiplicative sensor noise,
// and a 12 px fade to white at the silhouette boundary.
GrayImage render_impression(const GrayImage& master, const FingerShape& shape,
                            const OrientationField& of, const ImpressionSpec& spec);

struct MasterPrint {
    SingularityLayout layout;
    OrientationField of;
    FrequencyMap fm;
    ForegroundMask mask;
    GrayImage image;
};

MasterPrint generate_master(const SynthParams& params);

// Impression seed used by generate(); generate_mate with this seed and zero
// perturbation bounds reproduces generate() exactly.
uint64_t base_impression_seed(const SynthParams& params);

GrayImage generate(const SynthParams& params);
GrayImage generate(const MasterPrint& m, const SynthParams& params);

struct MateBounds {
    double max_rotation_deg = 15.0;
    double max_shift = 20.0;       // px, per axis
    double pressure_jitter = 0.15;
};

// Same master as generate(params), rendered under an independent impression
// seed with a random rigid perturbation and fresh pressure/creases/noise.
// The MasterPrint overloads skip regrowing the master.
GrayImage generate_mate(const SynthParams& params, uint64_t impression_seed,
                        const MateBounds& bounds = {});
GrayImage generate_mate(const MasterPrint& m, const SynthParams& params,
                        uint64_t impression_seed, const MateBounds& bounds = {});

}  // namespace fpkit
