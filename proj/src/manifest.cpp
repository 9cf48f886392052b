#include "fpkit/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "fpkit/errors.hpp"

namespace fs = std::filesystem;

namespace fpkit {

const ManifestEntry* Manifest::find(const std::string& print_id) const {
    for (const auto& e : entries)
        if (e.print_id == print_id) return &e;
    return nullptr;
}

std::string Manifest::resolve_path(const ManifestEntry& e) const {
    fs::path p(e.image_path);
    if (p.is_absolute() || base_dir.empty()) return e.image_path;
    return (fs::path(base_dir) / p).string();
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open manifest: " + path);

    Manifest m;
    m.base_dir = fs::path(path).parent_path().string();

    std::unordered_set<std::string> seen;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        ManifestEntry e;
        if (!std::getline(ls, e.print_id, '\t') ||
            !std::getline(ls, e.identity_id, '\t') ||
            !std::getline(ls, e.image_path, '\t')) {
            throw ValidationError("manifest line " + std::to_string(lineno) +
                                  ": expected 3 tab-separated fields");
        }
        std::string extra;
        if (std::getline(ls, extra, '\t'))
            throw ValidationError("manifest line " + std::to_string(lineno) +
                                  ": trailing field");
        if (e.print_id.empty() || e.identity_id.empty() || e.image_path.empty())
            throw ValidationError("manifest line " + std::to_string(lineno) +
                                  ": empty field");
        if (!seen.insert(e.print_id).second)
            throw ValidationError("manifest: duplicate print id '" + e.print_id + "'");
        m.entries.push_back(std::move(e));
    }
    for (const auto& e : m.entries) {
        std::string p = m.resolve_path(e);
        if (!fs::exists(p))
            throw ValidationError("manifest: missing image file: " + p);
    }
    return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    for (const auto& e : m.entries)
        out << e.print_id << '\t' << e.identity_id << '\t' << e.image_path << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fpkit
