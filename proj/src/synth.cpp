#include "fpkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpkit/angles.hpp"
#include "fpkit/errors.hpp"
#include "fpkit/ridge_ops.hpp"

namespace fpkit {

namespace {

// Stream ids hanging off the master seed.
constexpr uint64_t kStreamLayout = 1;
constexpr uint64_t kStreamFreq = 2;
constexpr uint64_t kStreamGrow = 3;
constexpr uint64_t kStreamImpression = 4;
// Stream ids hanging off an impression seed.
constexpr uint64_t kStreamPerturb = 10;
constexpr uint64_t kStreamCreaseCount = 11;
constexpr uint64_t kStreamCrease = 12;
constexpr uint64_t kStreamNoise = 13;

void validate(const SynthParams& p) {
    if (p.width < 128 || p.height < 128)
        throw ValidationError("synthesis needs width/height >= 128");
    if (p.pressure < 0.5 || p.pressure > 1.5)
        throw ValidationError("pressure must be in [0.5, 1.5]");
    if (p.ridge_period_min < 3.0 || p.ridge_period_max > 25.0 ||
        p.ridge_period_min > p.ridge_period_max)
        throw ValidationError("ridge period range must satisfy 3 <= min <= max <= 25");
    if (p.crease_count && *p.crease_count < 0)
        throw ValidationError("crease count must be >= 0");
    if (p.noise_sigma < 0.0)
        throw ValidationError("noise sigma must be >= 0");
}

}  // namespace

bool FingerShape::contains(double x, double y) const {
    double dx = x - cx;
    double a = dx < 0 ? half_left : half_right;
    if (a <= 0 || std::fabs(dx) > a) return false;
    double dy = y - cy;
    if (std::fabs(dy) <= band_half) return true;
    double b = dy < 0 ? top_axis : bottom_axis;
    if (b <= 0) return false;
    double ey = (std::fabs(dy) - band_half) / b;
    double ex = dx / a;
    return ex * ex + ey * ey <= 1.0;
}

bool FingerShape::contains_with_margin(double x, double y, double margin) const {
    if (!contains(x, y)) return false;
    for (int k = 0; k < 36; ++k) {
        double a = 2.0 * kPi * k / 36.0;
        if (!contains(x + margin * std::cos(a), y + margin * std::sin(a)))
            return false;
    }
    return true;
}

SingularityLayout sample_layout(const SynthParams& params, Rng& rng) {
    validate(params);
    double s = std::min(params.width, params.height) / 512.0;
    double w = params.width, h = params.height;

    for (int attempt = 0; attempt < 1000; ++attempt) {
        SingularityLayout lay;
        FingerShape& sh = lay.shape;
        sh.half_left = s * rng.uniform(115.0, 160.0);
        sh.half_right = s * rng.uniform(115.0, 160.0);
        sh.band_half = s * rng.uniform(40.0, 70.0);
        sh.top_axis = s * rng.uniform(90.0, 130.0);
        sh.bottom_axis = s * rng.uniform(110.0, 150.0);
        sh.cx = w / 2.0 + s * rng.uniform(-10.0, 10.0);
        sh.cy = h / 2.0 + s * rng.uniform(-10.0, 10.0);

        lay.finger_class = params.finger_class
                               ? *params.finger_class
                               : static_cast<FingerClass>(rng.below(4));
        lay.theta0 = rng.uniform(-0.15, 0.15);
        lay.arch_amp = rng.uniform(0.8, 1.4);
        lay.arch_sigma = s * rng.uniform(70.0, 110.0);
        lay.arch_drop = s * rng.uniform(0.0, 40.0);

        // Half a pixel of offset keeps singularities off pixel centers.
        auto snap = [](double v) { return std::floor(v) + 0.5; };
        auto place = [&](double x, double y) {
            return std::pair<double, double>(snap(x), snap(y));
        };

        switch (lay.finger_class) {
            case FingerClass::arch:
                break;
            case FingerClass::left_loop:
                lay.cores.push_back(place(sh.cx + s * rng.uniform(-30.0, 10.0),
                                          sh.cy - s * rng.uniform(10.0, 60.0)));
                lay.deltas.push_back(place(sh.cx + s * rng.uniform(30.0, 80.0),
                                           sh.cy + s * rng.uniform(40.0, 90.0)));
                break;
            case FingerClass::right_loop:
                lay.cores.push_back(place(sh.cx + s * rng.uniform(-10.0, 30.0),
                                          sh.cy - s * rng.uniform(10.0, 60.0)));
                lay.deltas.push_back(place(sh.cx - s * rng.uniform(30.0, 80.0),
                                           sh.cy + s * rng.uniform(40.0, 90.0)));
                break;
            case FingerClass::whorl: {
                auto upper = place(sh.cx + s * rng.uniform(-20.0, 20.0),
                                   sh.cy - s * rng.uniform(15.0, 50.0));
                int64_t sep = rng.uniform_int(static_cast<int64_t>(std::ceil(30.0 * s)),
                                              static_cast<int64_t>(std::floor(80.0 * s)));
                auto lower = place(upper.first + s * rng.uniform(-20.0, 20.0),
                                   upper.second + static_cast<double>(sep));
                lay.cores.push_back(upper);
                lay.cores.push_back(lower);
                lay.deltas.push_back(place(sh.cx - s * rng.uniform(60.0, 110.0),
                                           sh.cy + s * rng.uniform(30.0, 80.0)));
                lay.deltas.push_back(place(sh.cx + s * rng.uniform(60.0, 110.0),
                                           sh.cy + s * rng.uniform(30.0, 80.0)));
                break;
            }
        }

        double frame_margin = 12.0 * s;
        bool ok = sh.cx - sh.half_left >= frame_margin &&
                  sh.cx + sh.half_right <= w - frame_margin &&
                  sh.cy - sh.band_half - sh.top_axis >= frame_margin &&
                  sh.cy + sh.band_half + sh.bottom_axis <= h - frame_margin;
        double sing_margin = 40.0 * s;
        for (auto& pt : lay.cores)
            ok = ok && sh.contains_with_margin(pt.first, pt.second, sing_margin);
        for (auto& pt : lay.deltas)
            ok = ok && sh.contains_with_margin(pt.first, pt.second, sing_margin);
        if (ok) return lay;
    }
    throw std::runtime_error("layout infeasible");
}

OrientationField build_orientation(const SingularityLayout& layout, int width,
                                   int height, int block_size) {
    int cols = (width + block_size - 1) / block_size;
    int rows = (height + block_size - 1) / block_size;
    OrientationField of(cols, rows, block_size);
    const FingerShape& sh = layout.shape;

    for (int by = 0; by < rows; ++by) {
        for (int bx = 0; bx < cols; ++bx) {
            double x = (bx + 0.5) * block_size;
            double y = (by + 0.5) * block_size;
            double theta;
            if (layout.finger_class == FingerClass::arch) {
                double span = sh.half_left + sh.half_right;
                double bend = layout.arch_amp *
                              std::exp(-0.5 * std::pow((y - (sh.cy + layout.arch_drop)) /
                                                           layout.arch_sigma,
                                                       2.0)) *
                              std::sin(kPi * (x - sh.cx) / span);
                theta = layout.theta0 + std::atan(bend);
            } else {
                double sum = 0.0;
                for (auto& c : layout.cores) sum += std::atan2(y - c.second, x - c.first);
                for (auto& d : layout.deltas) sum -= std::atan2(y - d.second, x - d.first);
                theta = layout.theta0 + 0.5 * sum;
            }
            size_t b = of.idx(bx, by);
            of.theta[b] = wrap_pi(theta);
            of.coherence[b] = sh.contains(x, y) ? 1.0 : 0.0;
        }
    }
    return of;
}

ForegroundMask shape_mask(const FingerShape& shape, int width, int height,
                          int block_size) {
    int cols = (width + block_size - 1) / block_size;
    int rows = (height + block_size - 1) / block_size;
    ForegroundMask mask(cols, rows, block_size);
    for (int by = 0; by < rows; ++by)
        for (int bx = 0; bx < cols; ++bx)
            mask.fg[mask.idx(bx, by)] =
                shape.contains((bx + 0.5) * block_size, (by + 0.5) * block_size) ? 1 : 0;
    return mask;
}

GrayImage grow_ridges(const OrientationField& of, const FrequencyMap& fm,
                      const ForegroundMask& mask, int width, int height, Rng& rng,
                      int max_passes) {
    const int ksize = 11, half = ksize / 2;
    GrayImage out(width, height, 255);

    std::vector<std::pair<int, int>> fg_pixels;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (mask.is_fg_pixel(x, y)) fg_pixels.emplace_back(x, y);
    if (fg_pixels.empty()) return out;

    // L2-normalized kernel per foreground block.
    double fallback = fm.mean_present(1.0 / 9.0);
    std::vector<std::vector<double>> kernels(mask.fg.size());
    for (int by = 0; by < mask.rows; ++by) {
        for (int bx = 0; bx < mask.cols; ++bx) {
            if (!mask.is_fg(bx, by)) continue;
            double f = fm.has(bx, by) ? fm.at(bx, by) : fallback;
            std::vector<double> k = gabor_kernel(of.theta_at(bx, by), f);
            double norm = 0.0;
            for (double v : k) norm += v * v;
            norm = std::sqrt(norm);
            if (norm > 1e-12)
                for (double& v : k) v /= norm;
            kernels[mask.idx(bx, by)] = std::move(k);
        }
    }

    std::vector<double> field(static_cast<size_t>(width) * height, 0.0);
    std::vector<double> next(field.size(), 0.0);
    for (int i = 0; i < 50; ++i) {
        auto [sx, sy] = fg_pixels[rng.below(fg_pixels.size())];
        field[static_cast<size_t>(sy) * width + sx] = -1.0;  // dark seed point
    }

    const double gain = 2.5;
    for (int pass = 0; pass < max_passes; ++pass) {
        double change = 0.0;
        for (auto [x, y] : fg_pixels) {
            const std::vector<double>& k =
                kernels[mask.idx(detail::block_of(x, mask.block_size, mask.cols),
                                 detail::block_of(y, mask.block_size, mask.rows))];
            double resp = 0.0;
            int dy0 = std::max(-half, -y), dy1 = std::min(half, height - 1 - y);
            int dx0 = std::max(-half, -x), dx1 = std::min(half, width - 1 - x);
            for (int dy = dy0; dy <= dy1; ++dy) {
                const double* row = field.data() + static_cast<size_t>(y + dy) * width + x;
                const double* krow = k.data() + static_cast<size_t>(dy + half) * ksize + half;
                for (int dx = dx0; dx <= dx1; ++dx) resp += krow[dx] * row[dx];
            }
            size_t idx = static_cast<size_t>(y) * width + x;
            double v = std::tanh(gain * resp);
            change += std::fabs(v - field[idx]);
            next[idx] = v;
        }
        for (auto [x, y] : fg_pixels) {
            size_t idx = static_cast<size_t>(y) * width + x;
            field[idx] = next[idx];
        }
        if (change / fg_pixels.size() < 0.5 / 128.0) break;  // < 0.5 gray levels
    }

    for (auto [x, y] : fg_pixels) {
        double v = 128.0 * (1.0 + field[static_cast<size_t>(y) * width + x]);
        out.at(x, y) = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
    return out;
}

namespace {

// Chamfer 3-4 distance (in thirds of a pixel) to the nearest zero of fg.
std::vector<int> chamfer_distance(const std::vector<uint8_t>& fg, int w, int h) {
    const int kInf = 1 << 28;
    std::vector<int> d(fg.size());
    for (size_t i = 0; i < fg.size(); ++i) d[i] = fg[i] ? kInf : 0;
    auto at = [&](int x, int y) -> int& { return d[static_cast<size_t>(y) * w + x]; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int v = at(x, y);
            if (x > 0) v = std::min(v, at(x - 1, y) + 3);
            if (y > 0) {
                v = std::min(v, at(x, y - 1) + 3);
                if (x > 0) v = std::min(v, at(x - 1, y - 1) + 4);
                if (x + 1 < w) v = std::min(v, at(x + 1, y - 1) + 4);
            }
            at(x, y) = v;
        }
    for (int y = h - 1; y >= 0; --y)
        for (int x = w - 1; x >= 0; --x) {
            int v = at(x, y);
            if (x + 1 < w) v = std::min(v, at(x + 1, y) + 3);
            if (y + 1 < h) {
                v = std::min(v, at(x, y + 1) + 3);
                if (x + 1 < w) v = std::min(v, at(x + 1, y + 1) + 4);
                if (x > 0) v = std::min(v, at(x - 1, y + 1) + 4);
            }
            at(x, y) = v;
        }
    return d;
}

}  // namespace

GrayImage render_impression(const GrayImage& master, const FingerShape& shape,
                            const OrientationField& of, const ImpressionSpec& spec) {
    int w = master.width, h = master.height;
    double phi = deg_to_rad(spec.rotation_deg);
    double c = std::cos(phi), s = std::sin(phi);
    double ox = w / 2.0, oy = h / 2.0;
    bool identity = spec.rotation_deg == 0.0 && spec.dx == 0.0 && spec.dy == 0.0;

    // Inverse mapping: output pixel -> master coordinates.
    auto source = [&](double x, double y) {
        double rx = x - ox - spec.dx, ry = y - oy - spec.dy;
        return std::pair<double, double>(ox + c * rx + s * ry, oy - s * rx + c * ry);
    };

    GrayImage out(w, h, 255, master.dpi);
    std::vector<uint8_t> fg(static_cast<size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto [sx, sy] = source(x, y);
            size_t idx = static_cast<size_t>(y) * w + x;
            fg[idx] = shape.contains(sx, sy) ? 1 : 0;
            if (identity) {
                out.pixels[idx] = master.pixels[idx];
            } else if (sx >= 0 && sy >= 0 && sx <= w - 1 && sy <= h - 1) {
                out.pixels[idx] =
                    static_cast<uint8_t>(std::lround(sample_bilinear(master, sx, sy)));
            }
        }
    }

    // Pressure: heavier pressure thickens (dark dilation), lighter thins.
    int radius = static_cast<int>(std::lround(2.0 * std::fabs(spec.pressure - 1.0)));
    if (radius > 0) {
        std::vector<std::pair<int, int>> disk;
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx)
                if (dx * dx + dy * dy <= radius * radius) disk.emplace_back(dx, dy);
        GrayImage src = out;
        bool thicken = spec.pressure > 1.0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (!fg[static_cast<size_t>(y) * w + x]) continue;
                int best = src.at(x, y);
                for (auto [dx, dy] : disk) {
                    int nx = x + dx, ny = y + dy;
                    if (!src.in_bounds(nx, ny)) continue;
                    int v = src.at(nx, ny);
                    best = thicken ? std::min(best, v) : std::max(best, v);
                }
                out.at(x, y) = static_cast<uint8_t>(best);
            }
    }

    // Creases: full white chords through the foreground, aligned with the
    // local ridge flow so they read as extra white lines in the signatures.
    if (spec.crease_count > 0) {
        Rng crng = Rng::derive(spec.seed, kStreamCrease);
        for (int k = 0; k < spec.crease_count; ++k) {
            int ax = -1, ay = -1;
            for (int tries = 0; tries < 200; ++tries) {
                int x = static_cast<int>(crng.below(static_cast<uint64_t>(w)));
                int y = static_cast<int>(crng.below(static_cast<uint64_t>(h)));
                if (fg[static_cast<size_t>(y) * w + x]) {
                    ax = x;
                    ay = y;
                    break;
                }
            }
            double jitter = crng.uniform(-4.0, 4.0);
            double width_px = crng.uniform(2.0, 4.0);
            if (ax < 0) continue;  // no foreground hit; draws stay consumed
            auto [sx, sy] = source(ax, ay);
            int mx = std::clamp(static_cast<int>(sx), 0, w - 1);
            int my = std::clamp(static_cast<int>(sy), 0, h - 1);
            double psi = of.theta_at_pixel(mx, my) + phi + deg_to_rad(jitter);
            double nx = std::sin(psi), ny = -std::cos(psi);  // chord normal
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    if (!fg[static_cast<size_t>(y) * w + x]) continue;
                    double dist = std::fabs((x - ax) * nx + (y - ay) * ny);
                    if (dist <= width_px / 2.0) out.at(x, y) = 255;
                }
        }
    }

    if (spec.noise_sigma > 0.0) {
        Rng nrng = Rng::derive(spec.seed, kStreamNoise);
        for (uint8_t& v : out.pixels) {
            double g = std::clamp(nrng.normal(1.0, spec.noise_sigma), 0.0, 2.0);
            v = static_cast<uint8_t>(std::lround(std::clamp(v * g, 0.0, 255.0)));
        }
    }

    // Fade to white across the last 12 px inside the silhouette; everything
    // outside goes white, which also trims block-mask overshoot.
    std::vector<int> dist = chamfer_distance(fg, w, h);
    const double fade = 12.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            size_t idx = static_cast<size_t>(y) * w + x;
            double d = dist[idx] / 3.0;
            if (d >= fade) continue;
            double f = d / fade;
            out.pixels[idx] = static_cast<uint8_t>(
                std::lround(255.0 - (255.0 - out.pixels[idx]) * f));
        }
    return out;
}

MasterPrint generate_master(const SynthParams& params) {
    validate(params);
    MasterPrint m;
    Rng layout_rng = Rng::derive(params.seed, kStreamLayout);
    m.layout = sample_layout(params, layout_rng);
    m.of = build_orientation(m.layout, params.width, params.height);
    m.mask = shape_mask(m.layout.shape, params.width, params.height);

    Rng freq_rng = Rng::derive(params.seed, kStreamFreq);
    double base_period = freq_rng.uniform(params.ridge_period_min, params.ridge_period_max);
    m.fm = FrequencyMap(m.of.cols, m.of.rows, m.of.block_size);
    for (size_t b = 0; b < m.fm.freq.size(); ++b) {
        double period = std::clamp(base_period * (1.0 + freq_rng.uniform(-0.04, 0.04)),
                                   3.0, 25.0);
        if (m.mask.fg[b]) m.fm.freq[b] = 1.0 / period;
    }

    Rng grow_rng = Rng::derive(params.seed, kStreamGrow);
    m.image = grow_ridges(m.of, m.fm, m.mask, params.width, params.height, grow_rng);
    m.image.dpi = params.dpi;
    return m;
}

uint64_t base_impression_seed(const SynthParams& params) {
    return Rng::derive_seed(params.seed, kStreamImpression);
}

namespace {

int draw_crease_count(const SynthParams& params, uint64_t impression_seed) {
    if (params.crease_count) return *params.crease_count;
    Rng rng = Rng::derive(impression_seed, kStreamCreaseCount);
    return static_cast<int>(rng.below(5));
}

}  // namespace

GrayImage generate(const MasterPrint& m, const SynthParams& params) {
    ImpressionSpec spec;
    spec.pressure = params.pressure;
    spec.noise_sigma = params.noise_sigma;
    spec.seed = base_impression_seed(params);
    spec.crease_count = draw_crease_count(params, spec.seed);
    return render_impression(m.image, m.layout.shape, m.of, spec);
}

GrayImage generate(const SynthParams& params) {
    return generate(generate_master(params), params);
}

GrayImage generate_mate(const MasterPrint& m, const SynthParams& params,
                        uint64_t impression_seed, const MateBounds& bounds) {
    Rng prng = Rng::derive(impression_seed, kStreamPerturb);
    ImpressionSpec spec;
    spec.rotation_deg = prng.uniform(-bounds.max_rotation_deg, bounds.max_rotation_deg);
    spec.dx = prng.uniform(-bounds.max_shift, bounds.max_shift);
    spec.dy = prng.uniform(-bounds.max_shift, bounds.max_shift);
    spec.pressure = std::clamp(
        params.pressure + prng.uniform(-bounds.pressure_jitter, bounds.pressure_jitter),
        0.5, 1.5);
    spec.noise_sigma = params.noise_sigma;
    spec.seed = impression_seed;
    spec.crease_count = draw_crease_count(params, impression_seed);
    return render_impression(m.image, m.layout.shape, m.of, spec);
}

GrayImage generate_mate(const SynthParams& params, uint64_t impression_seed,
                        const MateBounds& bounds) {
    return generate_mate(generate_master(params), params, impression_seed, bounds);
}

}  // namespace fpkit
