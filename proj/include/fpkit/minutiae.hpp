#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpkit/fields.hpp"
#include "fpkit/image.hpp"

namespace fpkit {

enum class MinutiaKind : uint8_t { ending, bifurcation };

struct Minutia {
    int x = 0;
    int y = 0;
    double direction = 0.0;  // ridge-flow direction leaving the point, [0, 2pi)
    MinutiaKind kind = MinutiaKind::ending;
    double reliability = 0.0;  // orientation coherence of the containing block
};

struct MinutiaeTemplate {
    std::string source_id;
    int width = 0;
    int height = 0;
    std::vector<Minutia> minutiae;
};

struct ExtractParams {
    int block_size = 16;
    double variance_factor = 0.1;
    double border_margin = 10.0;     // px from the foreground boundary
    double spur_length = 8.0;        // max path length of a spur branch
    double ending_pair_dist = 8.0;   // facing ending-ending removal radius
    double min_separation = 5.0;     // final minimum spacing
    size_t max_minutiae = 300;
};

// Raw crossing-number scan of a skeleton: CN=1 -> ending, CN=3 -> bifurcation.
// Directions come from tracing the skeleton ~10 px out of the point; for a
// bifurcation the two most similar branch directions are bisected.
// Reliability is left at 0 here.
std::vector<Minutia> scan_minutiae(const Skeleton& skel);

// Spurious-minutiae removal: border margin, short spurs (the ending and its
// junction both go), facing ending pairs, minimum separation, count cap.
std::vector<Minutia> filter_minutiae(std::vector<Minutia> found, const Skeleton& skel,
                                     const ForegroundMask& mask, const ExtractParams& p);

// Full pipeline: segment -> orientation -> frequency -> enhance -> binarize ->
// thin -> scan -> filter.
MinutiaeTemplate extract_minutiae(const GrayImage& img, const ExtractParams& p = {});

struct MinutiaCounts {
    int endings = 0;
    int bifurcations = 0;
    double pct_bifurcation = 0.0;
};
MinutiaCounts minutia_counts(const MinutiaeTemplate& t);

struct ReliabilityStats {
    std::optional<double> mean_ending;
    std::optional<double> mean_bifurcation;
};
ReliabilityStats reliability_stats(const MinutiaeTemplate& t);

// Text template format: header "FPT1 <sourceId> <width> <height> <count>",
// then one "x y direction_deg kind reliability" line per minutia.
std::string format_template(const MinutiaeTemplate& t);
MinutiaeTemplate parse_template(const std::string& text);
void save_template(const MinutiaeTemplate& t, const std::string& path);
MinutiaeTemplate load_template(const std::string& path);

}  // namespace fpkit
