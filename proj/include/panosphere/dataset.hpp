#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "panosphere/image.hpp"

namespace panosphere {

struct ManifestEntry {
    std::string sample_id;
    std::filesystem::path image_path;  // relative to the manifest's directory
    std::filesystem::path label_path;
};

// Dataset description: entries plus the label-space parameters shared by all
// of them. Paths inside the file are stored relative to the manifest's own
// directory; root records that directory after loading so entries resolve
// from anywhere.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    int num_classes = 0;
    std::uint8_t ignore_id = 255;
    std::filesystem::path root;

    std::filesystem::path resolve_image(const ManifestEntry& e) const { return root / e.image_path; }
    std::filesystem::path resolve_labels(const ManifestEntry& e) const { return root / e.label_path; }
};

// Keys: entries (sample_id, image, labels), num_classes, ignore_id.
// Duplicate sample ids and unresolvable paths are rejected at load time.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// 8-bit gray or RGB PNG decoded to [0, 1] doubles (palette expanded to RGB).
ErpImage load_image(const std::filesystem::path& path);
// Quantizes back to 8-bit (round, clamp); load(save(x)) is exact iff x is
// already on the 8-bit lattice.
void save_image(const ErpImage& img, const std::filesystem::path& path);

// 8-bit single-channel PNG of raw class ids; palette files are rejected.
LabelMap load_labels(const std::filesystem::path& path, std::uint8_t ignore_id = 255);
void save_labels(const LabelMap& lbl, const std::filesystem::path& path);

}  // namespace panosphere
