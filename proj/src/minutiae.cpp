#include "fpkit/minutiae.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fpkit/angles.hpp"
#include "fpkit/errors.hpp"
#include "fpkit/ridge_ops.hpp"

namespace fpkit {

namespace {

// Neighbour cycle P2..P9, clockwise from north (same as the thinner).
constexpr int kNx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

int crossing_number(const Skeleton& s, int x, int y) {
    uint8_t n[8];
    for (int k = 0; k < 8; ++k) n[k] = s.at_or_zero(x + kNx[k], y + kNy[k]);
    int transitions = 0;
    for (int k = 0; k < 8; ++k) transitions += std::abs(int(n[(k + 1) % 8]) - int(n[k]));
    return transitions / 2;
}

// First pixel of each run of set neighbours; one trace start per branch.
std::vector<std::pair<int, int>> branch_starts(const Skeleton& s, int x, int y) {
    uint8_t n[8];
    for (int k = 0; k < 8; ++k) n[k] = s.at_or_zero(x + kNx[k], y + kNy[k]);
    std::vector<std::pair<int, int>> starts;
    for (int k = 0; k < 8; ++k)
        if (n[k] && !n[(k + 7) % 8])
            starts.emplace_back(x + kNx[k], y + kNy[k]);
    if (starts.empty() && n[0])  // fully surrounded ring; arbitrary start
        starts.emplace_back(x + kNx[0], y + kNy[0]);
    return starts;
}

struct TraceResult {
    int end_x, end_y;
    double length;
    bool hit_junction;  // stopped because >= 2 ways led onward
};

TraceResult trace_branch(const Skeleton& s, int px, int py, int fx, int fy,
                         double max_len) {
    int prev_x = px, prev_y = py;
    int cur_x = fx, cur_y = fy;
    double len = std::hypot(fx - px, fy - py);
    while (len < max_len) {
        int next_x = 0, next_y = 0, options = 0;
        for (int k = 0; k < 8; ++k) {
            int nx = cur_x + kNx[k], ny = cur_y + kNy[k];
            if (!s.at_or_zero(nx, ny)) continue;
            if (nx == prev_x && ny == prev_y) continue;
            // Ignore pixels adjacent to prev as well: on an 8-connected path a
            // diagonal step often touches both prev and the true successor.
            if (std::abs(nx - prev_x) <= 1 && std::abs(ny - prev_y) <= 1) continue;
            ++options;
            next_x = nx;
            next_y = ny;
        }
        if (options == 0) return {cur_x, cur_y, len, false};
        if (options > 1) return {cur_x, cur_y, len, true};
        len += std::hypot(next_x - cur_x, next_y - cur_y);
        prev_x = cur_x;
        prev_y = cur_y;
        cur_x = next_x;
        cur_y = next_y;
    }
    return {cur_x, cur_y, len, false};
}

constexpr double kTraceLen = 10.0;

double branch_direction(const Skeleton& s, int px, int py, int fx, int fy) {
    TraceResult t = trace_branch(s, px, py, fx, fy, kTraceLen);
    return wrap_two_pi(std::atan2(t.end_y - py, t.end_x - px));
}

}  // namespace

std::vector<Minutia> scan_minutiae(const Skeleton& skel) {
    std::vector<Minutia> out;
    for (int y = 0; y < skel.height; ++y) {
        for (int x = 0; x < skel.width; ++x) {
            if (!skel.at(x, y)) continue;
            int cn = crossing_number(skel, x, y);
            if (cn != 1 && cn != 3) continue;
            auto starts = branch_starts(skel, x, y);
            if (starts.empty()) continue;

            Minutia m;
            m.x = x;
            m.y = y;
            if (cn == 1) {
                m.kind = MinutiaKind::ending;
                m.direction = branch_direction(skel, x, y, starts[0].first, starts[0].second);
            } else {
                m.kind = MinutiaKind::bifurcation;
                std::vector<double> dirs;
                for (auto& st : starts)
                    dirs.push_back(branch_direction(skel, x, y, st.first, st.second));
                // Flow direction: bisector of the two most similar branches,
                // i.e. the two prongs of the fork.
                size_t bi = 0, bj = 1;
                double best = 1e9;
                for (size_t i = 0; i < dirs.size(); ++i)
                    for (size_t j = i + 1; j < dirs.size(); ++j) {
                        double d = std::fabs(wrap_deg_180(rad_to_deg(dirs[i] - dirs[j])));
                        if (d < best) {
                            best = d;
                            bi = i;
                            bj = j;
                        }
                    }
                double sx = std::sin(dirs[bi]) + std::sin(dirs[bj]);
                double cx = std::cos(dirs[bi]) + std::cos(dirs[bj]);
                m.direction = (std::fabs(sx) + std::fabs(cx) < 1e-9)
                                  ? dirs[bi]  // degenerate opposite pair
                                  : wrap_two_pi(std::atan2(sx, cx));
            }
            out.push_back(m);
        }
    }
    return out;
}

namespace {

bool near_background(const ForegroundMask& mask, int w, int h, int x, int y, double margin) {
    int r = static_cast<int>(std::ceil(margin));
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy > margin * margin) continue;
            int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) return true;
            if (!mask.is_fg_pixel(nx, ny)) return true;
        }
    return false;
}

bool facing(const Minutia& a, const Minutia& b) {
    // Directions leave along the surviving ridge, i.e. away from the break:
    // a faces b when a's direction points from b towards a and vice versa.
    double away_a = std::atan2(a.y - b.y, a.x - b.x);
    double away_b = std::atan2(b.y - a.y, b.x - a.x);
    return std::fabs(wrap_deg_180(rad_to_deg(a.direction - away_a))) <= 45.0 &&
           std::fabs(wrap_deg_180(rad_to_deg(b.direction - away_b))) <= 45.0;
}

}  // namespace

std::vector<Minutia> filter_minutiae(std::vector<Minutia> found, const Skeleton& skel,
                                     const ForegroundMask& mask, const ExtractParams& p) {
    // 1. Too close to the foreground boundary (or the image edge).
    std::vector<Minutia> kept;
    for (const Minutia& m : found)
        if (!near_background(mask, skel.width, skel.height, m.x, m.y, p.border_margin))
            kept.push_back(m);

    // 2. Short spurs: the ending goes, and so does the junction it hangs off.
    std::set<std::pair<int, int>> dead_junctions;
    std::vector<char> drop(kept.size(), 0);
    for (size_t i = 0; i < kept.size(); ++i) {
        if (kept[i].kind != MinutiaKind::ending) continue;
        auto starts = branch_starts(skel, kept[i].x, kept[i].y);
        if (starts.empty()) continue;
        TraceResult t = trace_branch(skel, kept[i].x, kept[i].y, starts[0].first,
                                     starts[0].second, p.spur_length);
        if (t.length < p.spur_length) {
            drop[i] = 1;  // spur tip or fragment shorter than the threshold
            if (t.hit_junction) dead_junctions.insert({t.end_x, t.end_y});
        }
    }
    for (size_t i = 0; i < kept.size(); ++i)
        if (kept[i].kind == MinutiaKind::bifurcation &&
            dead_junctions.count({kept[i].x, kept[i].y}))
            drop[i] = 1;

    // 3. Facing ending pairs across a small gap (broken-ridge artifact).
    for (size_t i = 0; i < kept.size(); ++i) {
        if (drop[i] || kept[i].kind != MinutiaKind::ending) continue;
        for (size_t j = i + 1; j < kept.size(); ++j) {
            if (drop[j] || kept[j].kind != MinutiaKind::ending) continue;
            double d = std::hypot(kept[i].x - kept[j].x, kept[i].y - kept[j].y);
            if (d < p.ending_pair_dist && facing(kept[i], kept[j])) {
                drop[i] = drop[j] = 1;
                break;
            }
        }
    }

    std::vector<Minutia> stage;
    for (size_t i = 0; i < kept.size(); ++i)
        if (!drop[i]) stage.push_back(kept[i]);

    // 4. Minimum separation, preferring reliable minutiae, then 5. the cap.
    std::stable_sort(stage.begin(), stage.end(), [](const Minutia& a, const Minutia& b) {
        if (a.reliability != b.reliability) return a.reliability > b.reliability;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    std::vector<Minutia> out;
    for (const Minutia& m : stage) {
        bool ok = true;
        for (const Minutia& o : out)
            if (std::hypot(m.x - o.x, m.y - o.y) < p.min_separation) {
                ok = false;
                break;
            }
        if (ok) out.push_back(m);
        if (out.size() >= p.max_minutiae) break;
    }

    std::sort(out.begin(), out.end(), [](const Minutia& a, const Minutia& b) {
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return a.kind < b.kind;
    });
    return out;
}

MinutiaeTemplate extract_minutiae(const GrayImage& img, const ExtractParams& p) {
    if (img.width < 64 || img.height < 64)
        throw ValidationError("image too small for minutiae extraction (need >= 64x64)");

    MinutiaeTemplate t;
    t.width = img.width;
    t.height = img.height;

    ForegroundMask mask = segment(img, p.block_size, p.variance_factor);
    if (mask.fg_block_count() == 0) return t;  // empty foreground, empty template

    OrientationField of = estimate_orientation(img, p.block_size);
    FrequencyMap fm = estimate_frequency(img, of);
    GrayImage enhanced = gabor_enhance(img, of, fm, mask);
    BinaryImage bin = binarize(enhanced, mask);
    Skeleton skel = thin(bin);

    std::vector<Minutia> found = scan_minutiae(skel);
    for (Minutia& m : found)
        m.reliability = std::clamp(of.coherence_at_pixel(m.x, m.y), 0.0, 1.0);
    t.minutiae = filter_minutiae(std::move(found), skel, mask, p);
    return t;
}

MinutiaCounts minutia_counts(const MinutiaeTemplate& t) {
    MinutiaCounts c;
    for (const Minutia& m : t.minutiae)
        (m.kind == MinutiaKind::ending ? c.endings : c.bifurcations) += 1;
    c.pct_bifurcation = double(c.bifurcations) / std::max(1, c.endings + c.bifurcations);
    return c;
}

ReliabilityStats reliability_stats(const MinutiaeTemplate& t) {
    double sums[2] = {0.0, 0.0};
    int counts[2] = {0, 0};
    for (const Minutia& m : t.minutiae) {
        int k = m.kind == MinutiaKind::ending ? 0 : 1;
        sums[k] += m.reliability;
        counts[k] += 1;
    }
    ReliabilityStats r;
    if (counts[0] > 0) r.mean_ending = sums[0] / counts[0];
    if (counts[1] > 0) r.mean_bifurcation = sums[1] / counts[1];
    return r;
}

std::string format_template(const MinutiaeTemplate& t) {
    if (t.source_id.empty() ||
        t.source_id.find_first_of(" \t\r\n") != std::string::npos)
        throw ValidationError("template sourceId must be a non-empty token");
    std::string out = "FPT1 " + t.source_id + " " + std::to_string(t.width) + " " +
                      std::to_string(t.height) + " " + std::to_string(t.minutiae.size()) +
                      "\n";
    char line[128];
    for (const Minutia& m : t.minutiae) {
        std::snprintf(line, sizeof(line), "%d %d %.2f %c %.3f\n", m.x, m.y,
                      rad_to_deg(m.direction),
                      m.kind == MinutiaKind::ending ? 'E' : 'B', m.reliability);
        out += line;
    }
    return out;
}

MinutiaeTemplate parse_template(const std::string& text) {
    std::istringstream in(text);
    std::string magic;
    MinutiaeTemplate t;
    size_t count = 0;
    if (!(in >> magic >> t.source_id >> t.width >> t.height >> count) || magic != "FPT1")
        throw ValidationError("bad template header");
    if (t.width <= 0 || t.height <= 0)
        throw ValidationError("bad template dimensions");
    t.minutiae.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        Minutia m;
        double deg = 0.0;
        char kind = 0;
        if (!(in >> m.x >> m.y >> deg >> kind >> m.reliability))
            throw ValidationError("template row count does not match header");
        if (kind != 'E' && kind != 'B')
            throw ValidationError("bad minutia kind (want E or B)");
        if (m.reliability < 0.0 || m.reliability > 1.0)
            throw ValidationError("minutia reliability out of [0,1]");
        m.kind = kind == 'E' ? MinutiaKind::ending : MinutiaKind::bifurcation;
        m.direction = wrap_two_pi(deg_to_rad(deg));
        t.minutiae.push_back(m);
    }
    std::string extra;
    if (in >> extra) throw ValidationError("trailing data after declared minutiae");
    return t;
}

void save_template(const MinutiaeTemplate& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << format_template(t);
    if (!out) throw std::runtime_error("short write: " + path);
}

MinutiaeTemplate load_template(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_template(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

}  // namespace fpkit
