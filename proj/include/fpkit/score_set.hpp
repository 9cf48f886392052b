#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fpkit {

// A comparison request by template id; scoring turns a list of these into
// a ScoreSet with matching record order.
struct PairRecord {
    std::string probe_id;
    std::string gallery_id;
};
using PairList = std::vector<PairRecord>;

struct ScoreRecord {
    uint32_t probe = 0;
    uint32_t gallery = 0;
    uint32_t score = 0;
};

// Persisted batch-match result. Binary layout: magic "FPSC", u8 version=1,
// u64 record count, then {u32 probeIdx, u32 galleryIdx, u32 score} records,
// all little-endian. A text sidecar "<path>.ids" (one sourceId per line,
// line number = index) makes the file self-describing.
struct ScoreSet {
    std::vector<ScoreRecord> records;
    std::vector<std::string> ids;
};

void write_score_set(const ScoreSet& s, const std::string& path);
ScoreSet read_score_set(const std::string& path);

std::vector<int64_t> scores_of(const ScoreSet& s);

}  // namespace fpkit
