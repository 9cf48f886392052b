#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "fpkit/minutiae.hpp"
#include "fpkit/score_set.hpp"

namespace fpkit {

struct MatchParams {
    double d_max = 125.0;        // px, intra-pair distance cutoff
    double t_d = 10.0;           // px, pair-distance tolerance
    double t_theta_deg = 11.25;  // beta-angle tolerance
    double t_rot_deg = 22.5;     // rotation-consistency tolerance
};

// One minutia pair of a template: distance plus the two direction angles
// measured relative to the i->j segment (rigid-motion invariants).
struct IntraEntry {
    uint16_t i = 0, j = 0;  // minutia indices, i < j
    float d = 0.0f;
    float beta1 = 0.0f, beta2 = 0.0f;  // degrees in (-180, 180]
};

struct IntraTable {
    std::vector<IntraEntry> entries;  // sorted by (d, i, j)
    size_t minutia_count = 0;
    // Acceleration index: entries grouped into (10 px distance band) x
    // (11.25 degree beta1 sector) cells, CSR layout.
    int d_bands = 0;
    std::vector<uint32_t> cell_start;
    std::vector<uint32_t> cell_items;
};

IntraTable build_intra_table(const MinutiaeTemplate& t, const MatchParams& p = {});

// Greedy largest-consistent-cluster score over compatible entry pairs.
uint32_t match_score(const IntraTable& probe, const IntraTable& gallery,
                     const MatchParams& p = {});

uint32_t match_templates(const MinutiaeTemplate& probe, const MinutiaeTemplate& gallery,
                         const MatchParams& p = {});

// Read-only collection of prebuilt intra tables keyed by sourceId.
class TemplateStore {
public:
    void add(const MinutiaeTemplate& t, const MatchParams& p = {});
    uint32_t size() const { return static_cast<uint32_t>(tables_.size()); }
    const std::vector<std::string>& ids() const { return ids_; }
    const IntraTable& table(uint32_t idx) const { return tables_[idx]; }
    // Throws with the offending record index when the id cannot be resolved.
    uint32_t resolve(const std::string& id, size_t record_index) const;

private:
    std::vector<std::string> ids_;
    std::vector<IntraTable> tables_;
    std::unordered_map<std::string, uint32_t> index_;
};

// Scores every pair; records are emitted in exactly the input order no
// matter how many threads run.
ScoreSet match_batch(const TemplateStore& store, const PairList& pairs,
                     const MatchParams& p = {}, int threads = 0);
void match_batch_to_file(const TemplateStore& store, const PairList& pairs,
                         const std::string& out_path, const MatchParams& p = {},
                         int threads = 0);

}  // namespace fpkit
