#include "fpkit/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "fpkit/angles.hpp"
#include "fpkit/errors.hpp"
#include "fpkit/parallel.hpp"

namespace fpkit {

namespace {

constexpr double kBandWidth = 10.0;    // px per distance band
constexpr double kSectorWidth = 11.25;  // degrees per beta1 sector
constexpr int kSectors = 32;

inline int beta_sector(double beta_deg) {
    int s = static_cast<int>(std::floor((beta_deg + 180.0) / kSectorWidth));
    return ((s % kSectors) + kSectors) % kSectors;
}

}  // namespace

IntraTable build_intra_table(const MinutiaeTemplate& t, const MatchParams& p) {
    if (t.minutiae.size() > 65535)
        throw ValidationError("template too large for intra table");
    IntraTable table;
    table.minutia_count = t.minutiae.size();
    for (size_t i = 0; i < t.minutiae.size(); ++i) {
        for (size_t j = i + 1; j < t.minutiae.size(); ++j) {
            const Minutia& a = t.minutiae[i];
            const Minutia& b = t.minutiae[j];
            double d = std::hypot(double(b.x - a.x), double(b.y - a.y));
            if (d > p.d_max) continue;
            double seg = rad_to_deg(std::atan2(double(b.y - a.y), double(b.x - a.x)));
            IntraEntry e;
            e.i = static_cast<uint16_t>(i);
            e.j = static_cast<uint16_t>(j);
            e.d = static_cast<float>(d);
            e.beta1 = static_cast<float>(wrap_deg_180(rad_to_deg(a.direction) - seg));
            e.beta2 = static_cast<float>(wrap_deg_180(rad_to_deg(b.direction) - seg));
            table.entries.push_back(e);
        }
    }
    std::sort(table.entries.begin(), table.entries.end(),
              [](const IntraEntry& a, const IntraEntry& b) {
                  if (a.d != b.d) return a.d < b.d;
                  if (a.i != b.i) return a.i < b.i;
                  return a.j < b.j;
              });

    table.d_bands = static_cast<int>(p.d_max / kBandWidth) + 1;
    size_t cells = static_cast<size_t>(table.d_bands) * kSectors;
    std::vector<uint32_t> counts(cells, 0);
    auto cell_of = [&](const IntraEntry& e) {
        int band = std::min(static_cast<int>(e.d / kBandWidth), table.d_bands - 1);
        return static_cast<size_t>(band) * kSectors + beta_sector(e.beta1);
    };
    for (const IntraEntry& e : table.entries) ++counts[cell_of(e)];
    table.cell_start.assign(cells + 1, 0);
    for (size_t c = 0; c < cells; ++c) table.cell_start[c + 1] = table.cell_start[c] + counts[c];
    table.cell_items.resize(table.entries.size());
    std::vector<uint32_t> fill(table.cell_start.begin(), table.cell_start.end() - 1);
    for (uint32_t idx = 0; idx < table.entries.size(); ++idx)
        table.cell_items[fill[cell_of(table.entries[idx])]++] = idx;
    return table;
}

namespace {

struct Candidate {
    uint32_t pe, ge;    // entry index in probe / gallery table
    float rot;          // mean beta residual, degrees
};

// Mirror-invariant ordering so match(a,b) and match(b,a) visit the same
// candidate sequence: every key is unchanged when probe and gallery swap.
struct CandidateOrder {
    const std::vector<IntraEntry>* pe_entries;
    const std::vector<IntraEntry>* ge_entries;

    bool operator()(const Candidate& a, const Candidate& b) const {
        auto key = [&](const Candidate& c) {
            const IntraEntry& p = (*pe_entries)[c.pe];
            const IntraEntry& g = (*ge_entries)[c.ge];
            bool probe_minor = c.pe < c.ge || (c.pe == c.ge && p.d <= g.d);
            const IntraEntry& lo = probe_minor ? p : g;
            const IntraEntry& hi = probe_minor ? g : p;
            return std::tuple<float, uint32_t, uint32_t, float, float, float, float>(
                p.d + g.d, std::min(c.pe, c.ge), std::max(c.pe, c.ge), lo.d, hi.d,
                lo.beta1, hi.beta1);
        };
        auto ka = key(a), kb = key(b);
        if (ka != kb) return ka < kb;
        if (a.pe != b.pe) return a.pe < b.pe;
        return a.ge < b.ge;
    }
};

}  // namespace

uint32_t match_score(const IntraTable& probe, const IntraTable& gallery,
                     const MatchParams& p) {
    if (probe.minutia_count < 2 || gallery.minutia_count < 2) return 0;
    if (probe.entries.empty() || gallery.entries.empty()) return 0;

    int band_reach = static_cast<int>(std::ceil(p.t_d / kBandWidth));
    int sector_reach = static_cast<int>(std::ceil(p.t_theta_deg / kSectorWidth));

    std::vector<Candidate> cands;
    for (uint32_t pe = 0; pe < probe.entries.size(); ++pe) {
        const IntraEntry& e = probe.entries[pe];
        int band = std::min(static_cast<int>(e.d / kBandWidth), gallery.d_bands - 1);
        int sector = beta_sector(e.beta1);
        for (int db = -band_reach; db <= band_reach; ++db) {
            int b = band + db;
            if (b < 0 || b >= gallery.d_bands) continue;
            for (int ds = -sector_reach; ds <= sector_reach; ++ds) {
                int s = ((sector + ds) % kSectors + kSectors) % kSectors;
                size_t cell = static_cast<size_t>(b) * kSectors + s;
                for (uint32_t k = gallery.cell_start[cell]; k < gallery.cell_start[cell + 1]; ++k) {
                    uint32_t ge = gallery.cell_items[k];
                    const IntraEntry& g = gallery.entries[ge];
                    if (std::fabs(e.d - g.d) > p.t_d) continue;
                    double d1 = wrap_deg_180(double(e.beta1) - double(g.beta1));
                    if (std::fabs(d1) > p.t_theta_deg) continue;
                    double d2 = wrap_deg_180(double(e.beta2) - double(g.beta2));
                    if (std::fabs(d2) > p.t_theta_deg) continue;
                    double rot = wrap_deg_180(0.5 * (d1 + d2));
                    cands.push_back({pe, ge, static_cast<float>(rot)});
                }
            }
        }
    }
    if (cands.empty()) return 0;

    std::sort(cands.begin(), cands.end(), CandidateOrder{&probe.entries, &gallery.entries});

    // Association-key adjacency: candidates sharing (probe minutia ->
    // gallery minutia) links, CSR over sorted keys.
    uint32_t gm = static_cast<uint32_t>(gallery.minutia_count);
    size_t nc = cands.size();
    std::vector<std::pair<uint32_t, uint32_t>> key_pairs(2 * nc);
    auto assoc_keys = [&](const Candidate& c, uint32_t out[2]) {
        const IntraEntry& e = probe.entries[c.pe];
        const IntraEntry& g = gallery.entries[c.ge];
        out[0] = uint32_t(e.i) * gm + g.i;
        out[1] = uint32_t(e.j) * gm + g.j;
    };
    for (size_t c = 0; c < nc; ++c) {
        uint32_t keys[2];
        assoc_keys(cands[c], keys);
        key_pairs[2 * c] = {keys[0], static_cast<uint32_t>(c)};
        key_pairs[2 * c + 1] = {keys[1], static_cast<uint32_t>(c)};
    }
    std::sort(key_pairs.begin(), key_pairs.end());

    // For a candidate's key, locate its bucket by binary search.
    auto bucket = [&](uint32_t key) {
        return std::equal_range(key_pairs.begin(), key_pairs.end(),
                                std::make_pair(key, uint32_t(0)),
                                [](const auto& a, const auto& b) { return a.first < b.first; });
    };

    std::vector<uint32_t> mark(nc, 0);
    uint32_t epoch = 0;
    std::vector<int32_t> pmap(probe.minutia_count, -1), gmap(gallery.minutia_count, -1);
    std::vector<uint32_t> touched_p, touched_g, cluster;

    uint32_t best = 0;
    uint32_t ceiling = static_cast<uint32_t>(
        std::min(probe.entries.size(), gallery.entries.size()));

    for (size_t seed = 0; seed < nc && best < ceiling; ++seed) {
        ++epoch;
        for (uint32_t i : touched_p) pmap[i] = -1;
        for (uint32_t i : touched_g) gmap[i] = -1;
        touched_p.clear();
        touched_g.clear();
        cluster.clear();

        auto try_add = [&](uint32_t c) {
            const IntraEntry& e = probe.entries[cands[c].pe];
            const IntraEntry& g = gallery.entries[cands[c].ge];
            const uint16_t pm[2] = {e.i, e.j};
            const uint16_t gmn[2] = {g.i, g.j};
            for (int k = 0; k < 2; ++k) {
                if (pmap[pm[k]] != -1 && pmap[pm[k]] != gmn[k]) return false;
                if (gmap[gmn[k]] != -1 && gmap[gmn[k]] != pm[k]) return false;
            }
            for (int k = 0; k < 2; ++k) {
                if (pmap[pm[k]] == -1) touched_p.push_back(pm[k]);
                if (gmap[gmn[k]] == -1) touched_g.push_back(gmn[k]);
                pmap[pm[k]] = gmn[k];
                gmap[gmn[k]] = pm[k];
            }
            mark[c] = epoch;
            cluster.push_back(c);
            return true;
        };

        try_add(static_cast<uint32_t>(seed));
        for (size_t qi = 0; qi < cluster.size(); ++qi) {
            uint32_t m = cluster[qi];
            uint32_t keys[2];
            assoc_keys(cands[m], keys);
            for (uint32_t key : keys) {
                auto [lo, hi] = bucket(key);
                for (auto it = lo; it != hi; ++it) {
                    uint32_t c = it->second;
                    if (mark[c] == epoch) continue;
                    if (std::fabs(wrap_deg_180(double(cands[c].rot) - double(cands[m].rot))) >
                        p.t_rot_deg)
                        continue;
                    try_add(c);
                }
            }
        }
        best = std::max(best, static_cast<uint32_t>(cluster.size()));
    }
    return best;
}

uint32_t match_templates(const MinutiaeTemplate& probe, const MinutiaeTemplate& gallery,
                         const MatchParams& p) {
    return match_score(build_intra_table(probe, p), build_intra_table(gallery, p), p);
}

void TemplateStore::add(const MinutiaeTemplate& t, const MatchParams& p) {
    if (t.source_id.empty())
        throw ValidationError("template store needs non-empty sourceIds");
    if (index_.count(t.source_id))
        throw ValidationError("duplicate template id: " + t.source_id);
    index_.emplace(t.source_id, static_cast<uint32_t>(ids_.size()));
    ids_.push_back(t.source_id);
    tables_.push_back(build_intra_table(t, p));
}

uint32_t TemplateStore::resolve(const std::string& id, size_t record_index) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw std::runtime_error("pair record " + std::to_string(record_index) +
                                 ": unknown template id '" + id + "'");
    return it->second;
}

ScoreSet match_batch(const TemplateStore& store, const PairList& pairs,
                     const MatchParams& p, int threads) {
    ScoreSet out;
    out.ids = store.ids();
    out.records.resize(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
        out.records[i].probe = store.resolve(pairs[i].probe_id, i);
        out.records[i].gallery = store.resolve(pairs[i].gallery_id, i);
    }
    parallel_for(pairs.size(), threads, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i)
            out.records[i].score =
                match_score(store.table(out.records[i].probe),
                            store.table(out.records[i].gallery), p);
    });
    return out;
}

void match_batch_to_file(const TemplateStore& store, const PairList& pairs,
                         const std::string& out_path, const MatchParams& p, int threads) {
    write_score_set(match_batch(store, pairs, p, threads), out_path);
}

}  // namespace fpkit
