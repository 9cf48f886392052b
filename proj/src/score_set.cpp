#include "fpkit/score_set.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace fpkit {

namespace {

constexpr char kMagic[4] = {'F', 'P', 'S', 'C'};

void put_u32(std::string& buf, uint32_t v) {
    for (int k = 0; k < 4; ++k) buf.push_back(char((v >> (8 * k)) & 0xff));
}

void put_u64(std::string& buf, uint64_t v) {
    for (int k = 0; k < 8; ++k) buf.push_back(char((v >> (8 * k)) & 0xff));
}

uint32_t get_u32(const unsigned char* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
           uint32_t(p[3]) << 24;
}

uint64_t get_u64(const unsigned char* p) {
    uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | p[k];
    return v;
}

}  // namespace

void write_score_set(const ScoreSet& s, const std::string& path) {
    std::string buf;
    buf.reserve(13 + s.records.size() * 12);
    buf.append(kMagic, 4);
    buf.push_back(1);  // version
    put_u64(buf, s.records.size());
    for (const ScoreRecord& r : s.records) {
        put_u32(buf, r.probe);
        put_u32(buf, r.gallery);
        put_u32(buf, r.score);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("short write: " + path);

    if (!s.ids.empty()) {
        std::ofstream side(path + ".ids", std::ios::binary);
        if (!side) throw std::runtime_error("cannot open for writing: " + path + ".ids");
        for (const std::string& id : s.ids) side << id << "\n";
        if (!side) throw std::runtime_error("short write: " + path + ".ids");
    }
}

ScoreSet read_score_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (data.size() < 13 || std::memcmp(data.data(), kMagic, 4) != 0)
        throw std::runtime_error("not a score-set file: " + path);
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    if (p[4] != 1) throw std::runtime_error("unsupported score-set version: " + path);
    uint64_t count = get_u64(p + 5);
    if (data.size() != 13 + count * 12)
        throw std::runtime_error("truncated score-set file: " + path);

    ScoreSet s;
    s.records.resize(count);
    for (uint64_t i = 0; i < count; ++i) {
        const unsigned char* rec = p + 13 + i * 12;
        s.records[i] = {get_u32(rec), get_u32(rec + 4), get_u32(rec + 8)};
    }

    std::string side_path = path + ".ids";
    if (std::filesystem::exists(side_path)) {
        std::ifstream side(side_path, std::ios::binary);
        std::string line;
        while (std::getline(side, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            s.ids.push_back(line);
        }
    }
    return s;
}

std::vector<int64_t> scores_of(const ScoreSet& s) {
    std::vector<int64_t> v;
    v.reserve(s.records.size());
    for (const ScoreRecord& r : s.records) v.push_back(r.score);
    return v;
}

}  // namespace fpkit
