#pragma once

#include <cstdint>
#include <string>

#include "fpkit/matcher.hpp"
#include "fpkit/minutiae.hpp"

namespace fpkit {

// Run-wide knobs with module-namespaced config keys (matcher.t_d = 10).
struct RunConfig {
    MatchParams matcher;
    ExtractParams extract;

    int eval_per_print = 1000;       // eval.per_print
    double eval_target_far = 1e-4;   // eval.target_far
    size_t eval_cross_cap = 1000000; // eval.cross_cap
    bool eval_full_cross = false;    // eval.full_cross
    int64_t eval_hist_bin = 1;       // eval.hist_bin
    int metrics_patch_count = 15;    // metrics.patch_count

    uint64_t seed = 1;  // seed
    int threads = 0;    // threads; 0 = all hardware threads

    void validate() const;
};

// Applies one key; unknown keys and malformed values are validation errors.
void apply_config_kv(RunConfig& cfg, const std::string& key,
                     const std::string& value);

// Flat text: `key = value` lines, '#' comments, blank lines ignored.
RunConfig load_config(const std::string& path);

}  // namespace fpkit
