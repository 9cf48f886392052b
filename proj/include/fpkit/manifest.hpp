#pragma once

#include <string>
#include <vector>

namespace fpkit {

// One dataset row: a print (impression) belonging to an identity (finger).
struct ManifestEntry {
    std::string print_id;
    std::string identity_id;
    std::string image_path;  // relative to the manifest's directory
};

struct Manifest {
    std::vector<ManifestEntry> entries;
    std::string base_dir;

    const ManifestEntry* find(const std::string& print_id) const;
    std::string resolve_path(const ManifestEntry& e) const;
};

// Line format: print_id <TAB> identity_id <TAB> path. Loading validates
// print-id uniqueness and that every referenced image exists.
Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

}  // namespace fpkit
