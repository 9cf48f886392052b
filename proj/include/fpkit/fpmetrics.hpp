#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "fpkit/biostats.hpp"
#include "fpkit/fields.hpp"
#include "fpkit/image.hpp"

namespace fpkit {

inline constexpr int kPatchSize = 32;
inline constexpr int kPatchStride = 16;
inline constexpr double kPatchMinCoherence = 0.3;
inline constexpr double kFlatSpan = 8.0;  // min profile span in gray levels

// Mean gray sampled across the ridge flow of one 32x32 patch: profile[i] is
// the average along the ridge-parallel axis at normal offset i.
struct BlockSignature {
    std::array<double, kPatchSize> profile{};
    int origin_x = 0;
    int origin_y = 0;
};

struct SignatureRuns {
    std::vector<int> dark_widths;
    std::vector<int> light_widths;
};

struct SignatureFeatures {
    int ridges = 0;       // dark runs
    int white_lines = 0;  // light runs
    double rtvtr = 0.0;   // mean dark width / mean light width
};

struct PrintMetrics {
    double ridge_count = 0.0;
    double white_line_count = 0.0;
    double rtvtr = 0.0;
    double rtvtr_min_ratio = 0.0;  // min(r, 1/r), bounded to (0,1]
    double area_kpx2 = 0.0;
    std::optional<int> nfiq2;
};

// Patch must lie fully inside the image and have mean coherence > 0.3
// over the orientation blocks it covers ("unoriented block" otherwise).
BlockSignature block_signature(const GrayImage& img, const OrientationField& of,
                               int ox, int oy);

// Midrange-threshold run decomposition; throws "flat signature" when the
// profile spans fewer than kFlatSpan gray levels.
SignatureRuns signature_runs(const BlockSignature& s);
SignatureFeatures signature_features(const BlockSignature& s);

// Foreground-tiling candidates on a 16-px stride, ranked by the standard
// deviation of their dark-run widths (most uniform first), ties by (y,x).
std::vector<std::pair<int, int>> select_patches(const GrayImage& img,
                                                const OrientationField& of,
                                                const ForegroundMask& mask,
                                                int k = 15);

PrintMetrics print_metrics(const GrayImage& img,
                           std::optional<int> nfiq2 = std::nullopt,
                           int patch_count = 15);

struct MetricRow {
    std::string name;
    MetricSummary summary;
    double coverage = 1.0;  // fraction of prints contributing
};

std::vector<MetricRow> dataset_report(const std::vector<PrintMetrics>& metrics);

}  // namespace fpkit
