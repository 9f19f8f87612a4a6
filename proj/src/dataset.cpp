#include "panosphere/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "panosphere/error.hpp"
#include "panosphere/png_io.hpp"

namespace panosphere {

using nlohmann::json;

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ManifestError(path.string() + ": " + e.what());
    }

    DatasetManifest manifest;
    manifest.root = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    try {
        manifest.num_classes = doc.at("num_classes").get<int>();
        manifest.ignore_id = static_cast<std::uint8_t>(doc.value("ignore_id", 255));
        for (const json& e : doc.at("entries")) {
            ManifestEntry entry;
            entry.sample_id = e.at("sample_id").get<std::string>();
            entry.image_path = e.at("image").get<std::string>();
            entry.label_path = e.at("labels").get<std::string>();
            manifest.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw ManifestError(path.string() + ": " + e.what());
    }
    if (manifest.num_classes < 1)
        throw ManifestError(path.string() + ": num_classes must be positive");

    std::set<std::string> seen;
    for (const ManifestEntry& e : manifest.entries) {
        if (!seen.insert(e.sample_id).second)
            throw ManifestError(path.string() + ": duplicate sample_id '" + e.sample_id + "'");
        if (!std::filesystem::exists(manifest.resolve_image(e)))
            throw ManifestError(path.string() + ": missing image file for '" + e.sample_id +
                                "': " + manifest.resolve_image(e).string());
        if (!std::filesystem::exists(manifest.resolve_labels(e)))
            throw ManifestError(path.string() + ": missing label file for '" + e.sample_id +
                                "': " + manifest.resolve_labels(e).string());
    }
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    json doc;
    doc["num_classes"] = manifest.num_classes;
    doc["ignore_id"] = static_cast<int>(manifest.ignore_id);
    doc["entries"] = json::array();
    for (const ManifestEntry& e : manifest.entries) {
        doc["entries"].push_back({{"sample_id", e.sample_id},
                                  {"image", e.image_path.generic_string()},
                                  {"labels", e.label_path.generic_string()}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write to " + path.string() + " failed");
}

ErpImage load_image(const std::filesystem::path& path) {
    const PngBuffer buf = read_png(path, /*allow_palette_expand=*/true);
    ErpImage img(ImageDims(buf.height, buf.width), buf.channels);
    for (std::size_t k = 0; k < buf.pixels.size(); ++k)
        img.data[k] = static_cast<double>(buf.pixels[k]) / 255.0;
    return img;
}

void save_image(const ErpImage& img, const std::filesystem::path& path) {
    if (img.channels != 1 && img.channels != 3)
        throw InvalidArgument("only gray and RGB images can be written");
    PngBuffer buf;
    buf.width = img.dims.w;
    buf.height = img.dims.h;
    buf.channels = img.channels;
    buf.pixels.resize(img.data.size());
    for (std::size_t k = 0; k < img.data.size(); ++k) {
        const double v = std::clamp(img.data[k], 0.0, 1.0) * 255.0;
        buf.pixels[k] = static_cast<std::uint8_t>(std::lround(v));
    }
    write_png(path, buf);
}

LabelMap load_labels(const std::filesystem::path& path, std::uint8_t ignore_id) {
    const PngBuffer buf = read_png(path, /*allow_palette_expand=*/false);
    if (buf.channels != 1)
        throw FormatError(path.string() + ": label maps must be single-channel");
    LabelMap lbl(ImageDims(buf.height, buf.width));
    lbl.ignore_id = ignore_id;
    lbl.data.assign(buf.pixels.begin(), buf.pixels.end());
    return lbl;
}

void save_labels(const LabelMap& lbl, const std::filesystem::path& path) {
    PngBuffer buf;
    buf.width = lbl.dims.w;
    buf.height = lbl.dims.h;
    buf.channels = 1;
    buf.pixels.assign(lbl.data.begin(), lbl.data.end());
    write_png(path, buf);
}

}  // namespace panosphere
