#include "fpkit/config.hpp"

#include <fstream>
#include <stdexcept>

#include "fpkit/errors.hpp"

namespace fpkit {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw ValidationError("config " + key + ": not a number: '" + v + "'");
}

int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        int64_t x = std::stoll(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw ValidationError("config " + key + ": not an integer: '" + v + "'");
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        uint64_t x = std::stoull(v, &used);
        if (used == v.size() && v[0] != '-') return x;
    } catch (const std::exception&) {
    }
    throw ValidationError("config " + key + ": not an unsigned integer: '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError("config " + key + ": expected true/false: '" + v + "'");
}

}  // namespace

void RunConfig::validate() const {
    auto bad = [](const std::string& msg) { throw ValidationError("config: " + msg); };
    if (matcher.d_max <= 0) bad("matcher.d_max must be positive");
    if (matcher.t_d < 0) bad("matcher.t_d must be non-negative");
    if (matcher.t_theta_deg <= 0 || matcher.t_theta_deg > 90)
        bad("matcher.t_theta_deg must be in (0, 90]");
    if (matcher.t_rot_deg < 0 || matcher.t_rot_deg > 180)
        bad("matcher.t_rot_deg must be in [0, 180]");
    if (extract.block_size < 8 || extract.block_size > 32)
        bad("extract.block_size must be in [8, 32]");
    if (extract.variance_factor <= 0) bad("extract.variance_factor must be positive");
    if (extract.border_margin < 0) bad("extract.border_margin must be non-negative");
    if (extract.spur_length < 0) bad("extract.spur_length must be non-negative");
    if (extract.ending_pair_dist < 0)
        bad("extract.ending_pair_dist must be non-negative");
    if (extract.min_separation < 0) bad("extract.min_separation must be non-negative");
    if (extract.max_minutiae < 1) bad("extract.max_minutiae must be >= 1");
    if (eval_per_print < 1) bad("eval.per_print must be >= 1");
    if (eval_target_far < 0 || eval_target_far > 1)
        bad("eval.target_far must be in [0, 1]");
    if (eval_cross_cap < 1) bad("eval.cross_cap must be >= 1");
    if (eval_hist_bin < 1) bad("eval.hist_bin must be >= 1");
    if (metrics_patch_count < 1) bad("metrics.patch_count must be >= 1");
    if (threads < 0) bad("threads must be >= 0");
}

void apply_config_kv(RunConfig& cfg, const std::string& key,
                     const std::string& value) {
    if (key == "matcher.d_max") cfg.matcher.d_max = parse_real(key, value);
    else if (key == "matcher.t_d") cfg.matcher.t_d = parse_real(key, value);
    else if (key == "matcher.t_theta_deg") cfg.matcher.t_theta_deg = parse_real(key, value);
    else if (key == "matcher.t_rot_deg") cfg.matcher.t_rot_deg = parse_real(key, value);
    else if (key == "extract.block_size") cfg.extract.block_size = static_cast<int>(parse_int(key, value));
    else if (key == "extract.variance_factor") cfg.extract.variance_factor = parse_real(key, value);
    else if (key == "extract.border_margin") cfg.extract.border_margin = parse_real(key, value);
    else if (key == "extract.spur_length") cfg.extract.spur_length = parse_real(key, value);
    else if (key == "extract.ending_pair_dist") cfg.extract.ending_pair_dist = parse_real(key, value);
    else if (key == "extract.min_separation") cfg.extract.min_separation = parse_real(key, value);
    else if (key == "extract.max_minutiae") cfg.extract.max_minutiae = static_cast<size_t>(parse_u64(key, value));
    else if (key == "eval.per_print") cfg.eval_per_print = static_cast<int>(parse_int(key, value));
    else if (key == "eval.target_far") cfg.eval_target_far = parse_real(key, value);
    else if (key == "eval.cross_cap") cfg.eval_cross_cap = static_cast<size_t>(parse_u64(key, value));
    else if (key == "eval.full_cross") cfg.eval_full_cross = parse_bool(key, value);
    else if (key == "eval.hist_bin") cfg.eval_hist_bin = parse_int(key, value);
    else if (key == "metrics.patch_count") cfg.metrics_patch_count = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
    else throw ValidationError("config: unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": empty key or value");
        apply_config_kv(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

}  // namespace fpkit
