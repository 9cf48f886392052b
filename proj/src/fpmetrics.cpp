#include "fpkit/fpmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpkit/angles.hpp"
#include "fpkit/errors.hpp"
#include "fpkit/ridge_ops.hpp"

namespace fpkit {

namespace {

struct PatchOrientation {
    double theta = 0.0;
    double coherence = 0.0;
};

// Coherence-weighted doubled-angle mean over the orientation blocks the
// patch covers; nullopt when the patch is effectively unoriented.
std::optional<PatchOrientation> patch_orientation(const OrientationField& of,
                                                  int ox, int oy) {
    const int bs = of.block_size;
    int bx0 = std::clamp(ox / bs, 0, of.cols - 1);
    int bx1 = std::clamp((ox + kPatchSize - 1) / bs, 0, of.cols - 1);
    int by0 = std::clamp(oy / bs, 0, of.rows - 1);
    int by1 = std::clamp((oy + kPatchSize - 1) / bs, 0, of.rows - 1);
    double sx = 0.0, sy = 0.0, csum = 0.0;
    int cnt = 0;
    for (int by = by0; by <= by1; ++by)
        for (int bx = bx0; bx <= bx1; ++bx) {
            double c = of.coherence[static_cast<size_t>(by) * of.cols + bx];
            double t = of.theta[static_cast<size_t>(by) * of.cols + bx];
            sx += c * std::cos(2.0 * t);
            sy += c * std::sin(2.0 * t);
            csum += c;
            ++cnt;
        }
    double mean_coh = cnt > 0 ? csum / cnt : 0.0;
    if (mean_coh <= kPatchMinCoherence || std::hypot(sx, sy) < 1e-9)
        return std::nullopt;
    double theta = 0.5 * std::atan2(sy, sx);
    if (theta < 0.0) theta += kPi;
    return PatchOrientation{theta, mean_coh};
}

std::array<double, kPatchSize> sample_profile(const GrayImage& img, int ox,
                                              int oy, double theta) {
    const double cx = ox + (kPatchSize - 1) / 2.0;
    const double cy = oy + (kPatchSize - 1) / 2.0;
    const double ux = -std::sin(theta), uy = std::cos(theta);  // across ridges
    const double vx = std::cos(theta), vy = std::sin(theta);   // along ridges
    std::array<double, kPatchSize> profile{};
    for (int i = 0; i < kPatchSize; ++i) {
        double off = i - (kPatchSize - 1) / 2.0;
        double acc = 0.0;
        for (int t = 0; t < kPatchSize; ++t) {
            double along = t - (kPatchSize - 1) / 2.0;
            acc += sample_bilinear(img, cx + off * ux + along * vx,
                                   cy + off * uy + along * vy);
        }
        profile[static_cast<size_t>(i)] = acc / kPatchSize;
    }
    return profile;
}

double profile_span(const std::array<double, kPatchSize>& p) {
    auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    return *hi - *lo;
}

SignatureRuns runs_of(const std::array<double, kPatchSize>& p) {
    auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    double mid = 0.5 * (*lo + *hi);
    SignatureRuns runs;
    int i = 0;
    while (i < kPatchSize) {
        bool dark = p[static_cast<size_t>(i)] < mid;
        int j = i;
        while (j < kPatchSize && (p[static_cast<size_t>(j)] < mid) == dark) ++j;
        (dark ? runs.dark_widths : runs.light_widths).push_back(j - i);
        i = j;
    }
    return runs;
}

double width_std(const std::vector<int>& w) {
    if (w.empty()) return 0.0;
    double mean = 0.0;
    for (int x : w) mean += x;
    mean /= static_cast<double>(w.size());
    double m2 = 0.0;
    for (int x : w) m2 += (x - mean) * (x - mean);
    return std::sqrt(m2 / static_cast<double>(w.size()));
}

}  // namespace

BlockSignature block_signature(const GrayImage& img, const OrientationField& of,
                               int ox, int oy) {
    if (ox < 0 || oy < 0 || ox + kPatchSize > img.width ||
        oy + kPatchSize > img.height)
        throw ValidationError("patch outside image");
    auto po = patch_orientation(of, ox, oy);
    if (!po) throw std::runtime_error("unoriented block");
    BlockSignature s;
    s.origin_x = ox;
    s.origin_y = oy;
    s.profile = sample_profile(img, ox, oy, po->theta);
    return s;
}

SignatureRuns signature_runs(const BlockSignature& s) {
    if (profile_span(s.profile) < kFlatSpan)
        throw std::runtime_error("flat signature");
    return runs_of(s.profile);
}

SignatureFeatures signature_features(const BlockSignature& s) {
    SignatureRuns runs = signature_runs(s);
    double dark_total = 0.0, light_total = 0.0;
    for (int w : runs.dark_widths) dark_total += w;
    for (int w : runs.light_widths) light_total += w;
    SignatureFeatures f;
    f.ridges = static_cast<int>(runs.dark_widths.size());
    f.white_lines = static_cast<int>(runs.light_widths.size());
    double dark_mean = dark_total / std::max<size_t>(runs.dark_widths.size(), 1);
    double light_mean =
        light_total / std::max<size_t>(runs.light_widths.size(), 1);
    f.rtvtr = dark_mean / std::max(light_mean, 1e-9);
    return f;
}

std::vector<std::pair<int, int>> select_patches(const GrayImage& img,
                                                const OrientationField& of,
                                                const ForegroundMask& mask,
                                                int k) {
    if (k < 1) throw ValidationError("patch count must be >= 1");

    struct Cand {
        double spread;
        int y, x;
    };
    std::vector<Cand> cands;
    for (int oy = 0; oy + kPatchSize <= img.height; oy += kPatchStride) {
        for (int ox = 0; ox + kPatchSize <= img.width; ox += kPatchStride) {
            bool fg = true;
            for (int py = oy; py < oy + kPatchSize && fg; py += mask.block_size)
                for (int px = ox; px < ox + kPatchSize && fg;
                     px += mask.block_size)
                    fg = mask.is_fg_pixel(px, py);
            if (!fg || !mask.is_fg_pixel(ox + kPatchSize - 1, oy + kPatchSize - 1))
                continue;
            auto po = patch_orientation(of, ox, oy);
            if (!po) continue;
            auto profile = sample_profile(img, ox, oy, po->theta);
            if (profile_span(profile) < kFlatSpan) continue;
            cands.push_back({width_std(runs_of(profile).dark_widths), oy, ox});
        }
    }
    if (cands.empty()) throw std::runtime_error("no measurable patches");

    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.spread != b.spread) return a.spread < b.spread;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    size_t take = std::min(cands.size(), static_cast<size_t>(k));
    std::vector<std::pair<int, int>> out;
    out.reserve(take);
    for (size_t i = 0; i < take; ++i) out.emplace_back(cands[i].x, cands[i].y);
    return out;
}

PrintMetrics print_metrics(const GrayImage& img, std::optional<int> nfiq2,
                           int patch_count) {
    if (nfiq2 && (*nfiq2 < 0 || *nfiq2 > 100))
        throw ValidationError("nfiq2 score out of range [0,100]");

    OrientationField of = estimate_orientation(img);
    ForegroundMask mask = segment(img);
    auto patches = select_patches(img, of, mask, patch_count);

    double ridges = 0.0, whites = 0.0, rtvtr = 0.0, sym = 0.0;
    for (auto [ox, oy] : patches) {
        SignatureFeatures f = signature_features(block_signature(img, of, ox, oy));
        ridges += f.ridges;
        whites += f.white_lines;
        rtvtr += f.rtvtr;
        sym += std::min(f.rtvtr, 1.0 / f.rtvtr);
    }
    double n = static_cast<double>(patches.size());

    PrintMetrics m;
    m.ridge_count = ridges / n;
    m.white_line_count = whites / n;
    m.rtvtr = rtvtr / n;
    m.rtvtr_min_ratio = sym / n;
    m.area_kpx2 = mask.pixel_area(img.width, img.height) / 1000.0;
    m.nfiq2 = nfiq2;
    return m;
}

std::vector<MetricRow> dataset_report(const std::vector<PrintMetrics>& metrics) {
    if (metrics.empty()) throw std::runtime_error("empty metric list");
    auto row = [&](const std::string& name, auto getter) {
        std::vector<double> vals;
        vals.reserve(metrics.size());
        for (const auto& m : metrics) vals.push_back(getter(m));
        return MetricRow{name, summarize(vals), 1.0};
    };
    std::vector<MetricRow> rows;
    rows.push_back(row("ridge_count", [](const PrintMetrics& m) { return m.ridge_count; }));
    rows.push_back(row("white_line_count", [](const PrintMetrics& m) { return m.white_line_count; }));
    rows.push_back(row("rtvtr", [](const PrintMetrics& m) { return m.rtvtr; }));
    rows.push_back(row("rtvtr_min_ratio", [](const PrintMetrics& m) { return m.rtvtr_min_ratio; }));
    rows.push_back(row("area_kpx2", [](const PrintMetrics& m) { return m.area_kpx2; }));

    std::vector<double> nfiq;
    for (const auto& m : metrics)
        if (m.nfiq2) nfiq.push_back(static_cast<double>(*m.nfiq2));
    if (!nfiq.empty())
        rows.push_back({"nfiq2", summarize(nfiq),
                        static_cast<double>(nfiq.size()) /
                            static_cast<double>(metrics.size())});
    return rows;
}

}  // namespace fpkit
