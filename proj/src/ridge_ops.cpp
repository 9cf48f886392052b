#include "fpkit/ridge_ops.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "fpkit/angles.hpp"
#include "fpkit/errors.hpp"

namespace fpkit {

namespace {

void require_pipeline_size(const GrayImage& img) {
    if (img.width < 32 || img.height < 32)
        throw ValidationError("image too small for pipeline operations (need >= 32x32)");
}

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

inline uint8_t px_clamped(const GrayImage& img, int x, int y) {
    x = std::clamp(x, 0, img.width - 1);
    y = std::clamp(y, 0, img.height - 1);
    return img.at(x, y);
}

}  // namespace

OrientationField estimate_orientation(const GrayImage& img, int block_size) {
    require_pipeline_size(img);
    if (block_size < 8 || block_size > 32)
        throw ValidationError("orientation block size must be in [8, 32]");

    int cols = ceil_div(img.width, block_size);
    int rows = ceil_div(img.height, block_size);
    OrientationField of(cols, rows, block_size);

    // Per-block sums of the doubled-angle gradient vector (2GxGy, Gx^2-Gy^2)
    // and of the scalar gradient magnitude Gx^2+Gy^2.
    std::vector<double> vx(of.theta.size(), 0.0), vy(of.theta.size(), 0.0);
    std::vector<double> mag(of.theta.size(), 0.0);

    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double gx = -px_clamped(img, x - 1, y - 1) + px_clamped(img, x + 1, y - 1)
                        - 2.0 * px_clamped(img, x - 1, y) + 2.0 * px_clamped(img, x + 1, y)
                        - px_clamped(img, x - 1, y + 1) + px_clamped(img, x + 1, y + 1);
            double gy = -px_clamped(img, x - 1, y - 1) - 2.0 * px_clamped(img, x, y - 1)
                        - px_clamped(img, x + 1, y - 1) + px_clamped(img, x - 1, y + 1)
                        + 2.0 * px_clamped(img, x, y + 1) + px_clamped(img, x + 1, y + 1);
            size_t b = of.idx(x / block_size, y / block_size);
            vx[b] += 2.0 * gx * gy;
            vy[b] += gx * gx - gy * gy;
            mag[b] += gx * gx + gy * gy;
        }
    }

    for (size_t b = 0; b < mag.size(); ++b)
        of.coherence[b] = mag[b] > 1e-12 ? std::hypot(vx[b], vy[b]) / mag[b] : 0.0;

    // Smooth the doubled-angle vectors over 3x3 block neighbourhoods before
    // converting to an angle; this removes single-block outliers.
    for (int by = 0; by < rows; ++by) {
        for (int bx = 0; bx < cols; ++bx) {
            double sx = 0.0, sy = 0.0;
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    int nx = bx + dx, ny = by + dy;
                    if (nx < 0 || ny < 0 || nx >= cols || ny >= rows) continue;
                    sx += vx[of.idx(nx, ny)];
                    sy += vy[of.idx(nx, ny)];
                    ++n;
                }
            }
            sx /= n;
            sy /= n;
            size_t b = of.idx(bx, by);
            if (std::hypot(sx, sy) < 1e-9)
                of.theta[b] = 0.0;  // flat neighbourhood, no defined direction
            else
                of.theta[b] = wrap_pi(0.5 * std::atan2(sx, sy) + kPi / 2.0);
        }
    }
    return of;
}

namespace {

// Dark-peak positions (local minima) of a 1-D profile, with plateau centres.
std::vector<double> profile_minima(const std::vector<double>& p) {
    std::vector<double> minima;
    int n = static_cast<int>(p.size());
    int last_sign = 0;   // sign of the last non-zero difference
    int flat_start = 0;  // start of the current flat run
    for (int i = 0; i + 1 < n; ++i) {
        double d = p[i + 1] - p[i];
        int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0) continue;
        if (last_sign < 0 && s > 0)
            minima.push_back(0.5 * (flat_start + i));  // valley (possibly flat)
        if (s != last_sign) {
            last_sign = s;
        }
        flat_start = i + 1;
    }
    return minima;
}

}  // namespace

FrequencyMap estimate_frequency(const GrayImage& img, const OrientationField& of) {
    require_pipeline_size(img);
    FrequencyMap fm(of.cols, of.rows, of.block_size);
    const int kProfileLen = 32;   // samples along the normal axis
    const int kCrossHalf = 8;     // averaging half-width along the ridge axis

    for (int by = 0; by < of.rows; ++by) {
        for (int bx = 0; bx < of.cols; ++bx) {
            double theta = of.theta_at(bx, by);
            double cx = (bx + 0.5) * of.block_size;
            double cy = (by + 0.5) * of.block_size;
            // u runs across the ridges, v along them.
            double ux = -std::sin(theta), uy = std::cos(theta);
            double vxd = std::cos(theta), vyd = std::sin(theta);

            std::vector<double> profile(kProfileLen, 0.0);
            bool ok = true;
            for (int i = 0; i < kProfileLen && ok; ++i) {
                double off = i - kProfileLen / 2 + 0.5;
                double sum = 0.0;
                int cnt = 0;
                for (int t = -kCrossHalf; t < kCrossHalf; ++t) {
                    double x = cx + off * ux + (t + 0.5) * vxd;
                    double y = cy + off * uy + (t + 0.5) * vyd;
                    if (x < 0 || y < 0 || x > img.width - 1 || y > img.height - 1) continue;
                    sum += sample_bilinear(img, x, y);
                    ++cnt;
                }
                if (cnt < kCrossHalf)  // window mostly outside the image
                    ok = false;
                else
                    profile[i] = sum / cnt;
            }
            if (!ok) continue;

            // Light 3-tap smoothing to suppress single-sample jitter.
            std::vector<double> smooth(kProfileLen);
            for (int i = 0; i < kProfileLen; ++i) {
                double s = profile[i];
                int c = 1;
                if (i > 0) { s += profile[i - 1]; ++c; }
                if (i + 1 < kProfileLen) { s += profile[i + 1]; ++c; }
                smooth[i] = s / c;
            }

            std::vector<double> peaks = profile_minima(smooth);
            if (peaks.size() < 2) continue;
            double spacing = (peaks.back() - peaks.front()) / (peaks.size() - 1);
            if (spacing < 3.0 || spacing > 25.0) continue;
            fm.freq[fm.idx(bx, by)] = 1.0 / spacing;
        }
    }
    return fm;
}

namespace {

// 3x3 block-grid morphology; outside the grid counts as background.
std::vector<uint8_t> grid_dilate(const std::vector<uint8_t>& g, int cols, int rows) {
    std::vector<uint8_t> out(g.size(), 0);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) {
            uint8_t v = 0;
            for (int dy = -1; dy <= 1 && !v; ++dy)
                for (int dx = -1; dx <= 1 && !v; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx >= 0 && ny >= 0 && nx < cols && ny < rows && g[ny * cols + nx])
                        v = 1;
                }
            out[y * cols + x] = v;
        }
    return out;
}

std::vector<uint8_t> grid_erode(const std::vector<uint8_t>& g, int cols, int rows) {
    std::vector<uint8_t> out(g.size(), 0);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) {
            uint8_t v = 1;
            for (int dy = -1; dy <= 1 && v; ++dy)
                for (int dx = -1; dx <= 1 && v; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= cols || ny >= rows || !g[ny * cols + nx])
                        v = 0;
                }
            out[y * cols + x] = v;
        }
    return out;
}

std::vector<uint8_t> largest_component_4(const std::vector<uint8_t>& g, int cols, int rows) {
    std::vector<int> label(g.size(), -1);
    int best_label = -1;
    size_t best_size = 0;
    int next = 0;
    for (size_t start = 0; start < g.size(); ++start) {
        if (!g[start] || label[start] >= 0) continue;
        size_t size = 0;
        std::queue<int> q;
        q.push(static_cast<int>(start));
        label[start] = next;
        while (!q.empty()) {
            int cur = q.front();
            q.pop();
            ++size;
            int x = cur % cols, y = cur / cols;
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || ny[k] < 0 || nx[k] >= cols || ny[k] >= rows) continue;
                int ni = ny[k] * cols + nx[k];
                if (g[ni] && label[ni] < 0) {
                    label[ni] = next;
                    q.push(ni);
                }
            }
        }
        if (size > best_size) {
            best_size = size;
            best_label = next;
        }
        ++next;
    }
    std::vector<uint8_t> out(g.size(), 0);
    if (best_label >= 0)
        for (size_t i = 0; i < g.size(); ++i)
            out[i] = (label[i] == best_label) ? 1 : 0;
    return out;
}

}  // namespace

ForegroundMask segment(const GrayImage& img, int block_size, double variance_factor) {
    require_pipeline_size(img);
    if (block_size < 8 || block_size > 32)
        throw ValidationError("segmentation block size must be in [8, 32]");
    if (variance_factor < 0.0)
        throw ValidationError("variance factor must be non-negative");

    int cols = ceil_div(img.width, block_size);
    int rows = ceil_div(img.height, block_size);
    ForegroundMask mask(cols, rows, block_size);

    double gsum = 0.0, gsum2 = 0.0;
    for (uint8_t v : img.pixels) {
        gsum += v;
        gsum2 += static_cast<double>(v) * v;
    }
    double n = static_cast<double>(img.pixels.size());
    double global_var = std::max(0.0, gsum2 / n - (gsum / n) * (gsum / n));
    double threshold = variance_factor * global_var;

    std::vector<uint8_t> raw(mask.fg.size(), 0);
    for (int by = 0; by < rows; ++by) {
        for (int bx = 0; bx < cols; ++bx) {
            double s = 0.0, s2 = 0.0;
            int cnt = 0;
            int y1 = std::min((by + 1) * block_size, img.height);
            int x1 = std::min((bx + 1) * block_size, img.width);
            for (int y = by * block_size; y < y1; ++y)
                for (int x = bx * block_size; x < x1; ++x) {
                    double v = img.at(x, y);
                    s += v;
                    s2 += v * v;
                    ++cnt;
                }
            double var = std::max(0.0, s2 / cnt - (s / cnt) * (s / cnt));
            // Strict comparison so a perfectly flat image (zero global
            // variance) yields an empty mask.
            raw[mask.idx(bx, by)] = var > threshold && var > 1e-9 ? 1 : 0;
        }
    }

    auto opened = grid_dilate(grid_erode(raw, cols, rows), cols, rows);
    auto closed = grid_erode(grid_dilate(opened, cols, rows), cols, rows);
    mask.fg = largest_component_4(closed, cols, rows);
    return mask;
}

std::vector<double> gabor_kernel(double theta, double freq, double sigma, int ksize) {
    int half = ksize / 2;
    std::vector<double> k(static_cast<size_t>(ksize) * ksize);
    // The cosine runs along the normal to the ridge direction.
    double nx = -std::sin(theta), ny = std::cos(theta);
    double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    double sum = 0.0;
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            double u = dx * nx + dy * ny;
            double v = std::exp(-(dx * dx + dy * dy) * inv2s2) *
                       std::cos(2.0 * kPi * freq * u);
            k[(dy + half) * ksize + (dx + half)] = v;
            sum += v;
        }
    }
    double mean = sum / (static_cast<double>(ksize) * ksize);
    for (double& v : k) v -= mean;  // kill the DC response
    return k;
}

GrayImage gabor_enhance(const GrayImage& img, const OrientationField& of,
                        const FrequencyMap& fm, const ForegroundMask& mask) {
    require_pipeline_size(img);
    if (of.block_size != fm.block_size || of.block_size != mask.block_size)
        throw ValidationError("orientation/frequency/mask block sizes differ");

    const int ksize = 11, half = ksize / 2;
    double fallback = fm.mean_present(1.0 / 9.0);
    GrayImage out(img.width, img.height, 255, img.dpi);

    for (int by = 0; by < of.rows; ++by) {
        for (int bx = 0; bx < of.cols; ++bx) {
            if (!mask.is_fg(bx, by)) continue;
            double f = fm.has(bx, by) ? fm.at(bx, by) : fallback;
            std::vector<double> k = gabor_kernel(of.theta_at(bx, by), f);
            int y1 = std::min((by + 1) * of.block_size, img.height);
            int x1 = std::min((bx + 1) * of.block_size, img.width);
            for (int y = by * of.block_size; y < y1; ++y) {
                for (int x = bx * of.block_size; x < x1; ++x) {
                    double resp = 0.0;
                    for (int dy = -half; dy <= half; ++dy)
                        for (int dx = -half; dx <= half; ++dx)
                            resp += k[(dy + half) * ksize + (dx + half)] *
                                    px_clamped(img, x + dx, y + dy);
                    double v = 128.0 + resp;
                    out.at(x, y) = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
                }
            }
        }
    }
    return out;
}

BinaryImage binarize(const GrayImage& img, const ForegroundMask& mask) {
    require_pipeline_size(img);
    BinaryImage out(img.width, img.height);
    int bs = mask.block_size;
    for (int by = 0; by < mask.rows; ++by) {
        for (int bx = 0; bx < mask.cols; ++bx) {
            if (!mask.is_fg(bx, by)) continue;
            int y1 = std::min((by + 1) * bs, img.height);
            int x1 = std::min((bx + 1) * bs, img.width);
            double sum = 0.0;
            int cnt = 0;
            for (int y = by * bs; y < y1; ++y)
                for (int x = bx * bs; x < x1; ++x) {
                    sum += img.at(x, y);
                    ++cnt;
                }
            double mean = sum / cnt;
            for (int y = by * bs; y < y1; ++y)
                for (int x = bx * bs; x < x1; ++x)
                    out.at(x, y) = img.at(x, y) < mean ? 1 : 0;
        }
    }
    return out;
}

namespace {

// Zhang-Suen neighbour order: P2..P9 clockwise starting north.
constexpr int kNx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

struct NeighbourInfo {
    int count;        // B(p): number of set neighbours
    int transitions;  // A(p): 0->1 transitions around the cycle
    uint8_t n[8];
};

inline NeighbourInfo neighbours(const Skeleton& s, int x, int y) {
    NeighbourInfo info{0, 0, {}};
    for (int k = 0; k < 8; ++k) {
        info.n[k] = s.at_or_zero(x + kNx[k], y + kNy[k]);
        info.count += info.n[k];
    }
    for (int k = 0; k < 8; ++k)
        if (!info.n[k] && info.n[(k + 1) % 8]) ++info.transitions;
    return info;
}

bool zhang_suen_pass(Skeleton& s, int step) {
    std::vector<size_t> doomed;
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            if (!s.at(x, y)) continue;
            NeighbourInfo info = neighbours(s, x, y);
            if (info.count < 2 || info.count > 6 || info.transitions != 1) continue;
            // n[0]=N, n[2]=E, n[4]=S, n[6]=W
            bool cond;
            if (step == 0)
                cond = !(info.n[0] && info.n[2] && info.n[4]) &&
                       !(info.n[2] && info.n[4] && info.n[6]);
            else
                cond = !(info.n[0] && info.n[2] && info.n[6]) &&
                       !(info.n[0] && info.n[4] && info.n[6]);
            if (cond) doomed.push_back(s.idx(x, y));
        }
    }
    for (size_t i : doomed) s.bits[i] = 0;
    return !doomed.empty();
}

// Remove one safely-deletable pixel from every remaining all-set 2x2 square.
bool break_squares(Skeleton& s) {
    bool changed = false;
    for (int y = 0; y + 1 < s.height; ++y) {
        for (int x = 0; x + 1 < s.width; ++x) {
            if (!(s.at(x, y) && s.at(x + 1, y) && s.at(x, y + 1) && s.at(x + 1, y + 1)))
                continue;
            const int qx[4] = {x, x + 1, x, x + 1};
            const int qy[4] = {y, y, y + 1, y + 1};
            int pick = 0;
            for (int k = 0; k < 4; ++k) {
                NeighbourInfo info = neighbours(s, qx[k], qy[k]);
                if (info.transitions == 1) {  // deletion keeps the rest connected
                    pick = k;
                    break;
                }
            }
            s.at(qx[pick], qy[pick]) = 0;
            changed = true;
        }
    }
    return changed;
}

}  // namespace

Skeleton thin(const BinaryImage& bin) {
    Skeleton s(bin.width, bin.height);
    s.bits = bin.bits;
    for (auto& b : s.bits) b = b ? 1 : 0;

    bool changed = true;
    while (changed) {
        changed = false;
        bool any = true;
        while (any) {
            any = zhang_suen_pass(s, 0);
            any = zhang_suen_pass(s, 1) || any;
            changed = changed || any;
        }
        changed = break_squares(s) || changed;
    }
    return s;
}

}  // namespace fpkit
