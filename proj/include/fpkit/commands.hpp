#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpkit/config.hpp"
#include "fpkit/manifest.hpp"
#include "fpkit/matcher.hpp"

namespace fpkit {

struct SynthArgs {
    int count = 1;
    int mates = 1;  // impressions per identity
    uint64_t seed = 1;
    std::string finger_class;  // empty = random per master
    std::string out_dir;
    int width = 512;
    int height = 512;
    std::optional<int> crease_count;
    int threads = 0;
};

// Writes s<seed>_i<k>.png files plus manifest.tsv (identity = master seed).
Manifest cmd_synth(const SynthArgs& a);

struct IngestArgs {
    std::string image_dir;
    std::string rule = "perFile";  // perFile | fromFilename
    std::string pattern;           // regex with a capture group (fromFilename)
    std::string out_manifest;
};

Manifest cmd_ingest(const IngestArgs& a);

struct ExtractArgs {
    std::string manifest;
    std::string out_dir;  // one <print_id>.fpt per entry
    ExtractParams params;
    int threads = 0;
};

void cmd_extract(const ExtractArgs& a);

struct MatchArgs {
    std::string template_dir;
    std::string pairs_file;  // probe_id<TAB>gallery_id per line
    std::string out_scores;  // ScoreSet binary; "<out>.csv" also written
    MatchParams params;
    int threads = 0;
};

void cmd_match(const MatchArgs& a);

struct EvalArgs {
    std::string bona_manifest;
    std::string syn_manifest;
    std::string out_dir;
    RunConfig cfg;
};

// Imposter-score study of a synthetic set against a bonafide set:
// (a) bonafide self-imposter, (b) synthetic-vs-bonafide cross,
// (c) synthetic self-imposter; threshold selection on (a), false-match
// counts of (b)/(c), one-sided KS of (b) vs (a), histogram/CDF CSVs.
void cmd_eval_uniqueness(const EvalArgs& a);

struct MetricsArgs {
    std::vector<std::string> manifests;
    std::string nfiq2_csv;  // optional: print_id,score
    std::string out_dir;
    RunConfig cfg;
};

void cmd_metrics(const MetricsArgs& a);

// Distance between Gaussian fits of two feature CSVs; printed and returned.
double cmd_fid(const std::string& features_a, const std::string& features_b);

}  // namespace fpkit
