#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <doctest.h>

#include "panosphere/dataset.hpp"
#include "panosphere/error.hpp"
#include "panosphere/validation.hpp"
#include "temp_dir.hpp"

using namespace panosphere;

namespace {

void write_bytes(const std::filesystem::path& path, const unsigned char* data, std::size_t len) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
}

// 2x2 grayscale PNG with 16-bit samples (values 0, 256, 512, 768)
static const unsigned char kSixteenBitGrayPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d,
    0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02,
    0x10, 0x00, 0x00, 0x00, 0x00, 0x07, 0x4d, 0x8e, 0xbb, 0x00, 0x00, 0x00,
    0x12, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x60, 0x60, 0x64,
    0x60, 0x60, 0x62, 0x60, 0x66, 0x00, 0x00, 0x00, 0x1f, 0x00, 0x07, 0x92,
    0xad, 0x35, 0xcb, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae,
    0x42, 0x60, 0x82,
};

// 2x2 paletted PNG: indices 0,1 / 2,1 over a red/green/blue palette
static const unsigned char kPaletteRgbPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d,
    0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02,
    0x08, 0x03, 0x00, 0x00, 0x00, 0x45, 0x68, 0xfd, 0x16, 0x00, 0x00, 0x00,
    0x09, 0x50, 0x4c, 0x54, 0x45, 0xff, 0x00, 0x00, 0x00, 0xff, 0x00, 0x00,
    0x00, 0xff, 0x2d, 0x4a, 0xcd, 0x8a, 0x00, 0x00, 0x00, 0x0e, 0x49, 0x44,
    0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x60, 0x64, 0x60, 0x62, 0x04, 0x00,
    0x00, 0x0f, 0x00, 0x05, 0x2b, 0xdc, 0x64, 0x4f, 0x00, 0x00, 0x00, 0x00,
    0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82,
};

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("label maps round trip through PNG exactly") {
    TempDir dir("labels");
    const ImageDims dims(7, 13);
    std::mt19937_64 rng(5);
    LabelMap lbl(dims);
    for (auto& v : lbl.data)
        v = (rng() % 8 == 0) ? std::uint8_t{255} : static_cast<std::uint8_t>(rng() % 12);
    const auto path = dir / "lbl.png";
    save_labels(lbl, path);
    const LabelMap back = load_labels(path);
    CHECK(back == lbl);
}

TEST_CASE("images on the 8-bit lattice round trip; off-lattice values round") {
    TempDir dir("images");
    const ImageDims dims(4, 8);
    ErpImage gray(dims, 1);
    for (std::size_t k = 0; k < gray.data.size(); ++k)
        gray.data[k] = static_cast<double>((k * 9) % 256) / 255.0;
    const auto gpath = dir / "gray.png";
    save_image(gray, gpath);
    const ErpImage gback = load_image(gpath);
    REQUIRE(gback.channels == 1);
    REQUIRE(gback.dims == dims);
    CHECK(gback.data == gray.data);  // exact: already quantized

    ErpImage rgb(dims, 3);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : rgb.data) v = u(rng);
    const auto cpath = dir / "rgb.png";
    save_image(rgb, cpath);
    const ErpImage cback = load_image(cpath);
    REQUIRE(cback.channels == 3);
    for (std::size_t k = 0; k < rgb.data.size(); ++k) {
        // nearest 8-bit level, scaled back
        const double want = std::lround(rgb.data[k] * 255.0) / 255.0;
        CHECK(cback.data[k] == doctest::Approx(want).epsilon(1e-12));
    }

    // out-of-range values clamp instead of wrapping
    ErpImage wild(dims, 1);
    wild.data[0] = 1e6;
    wild.data.back() = -3.0;
    const auto wpath = dir / "wild.png";
    save_image(wild, wpath);
    const ErpImage wback = load_image(wpath);
    CHECK(wback.data[0] == 1.0);
    CHECK(wback.data.back() == 0.0);
}

TEST_CASE("palette PNGs expand to RGB as images but are rejected as labels") {
    TempDir dir("palette");
    const auto path = dir / "pal.png";
    write_bytes(path, kPaletteRgbPng, sizeof kPaletteRgbPng);

    const ErpImage img = load_image(path);
    REQUIRE(img.channels == 3);
    REQUIRE(img.dims == ImageDims(2, 2));
    CHECK(img.at(0, 0, 0) == 1.0);  // red
    CHECK(img.at(0, 0, 1) == 0.0);
    CHECK(img.at(0, 1, 1) == 1.0);  // green
    CHECK(img.at(1, 0, 2) == 1.0);  // blue

    CHECK_THROWS_AS(load_labels(path), FormatError);
}

TEST_CASE("sixteen-bit PNGs are rejected outright") {
    TempDir dir("deep");
    const auto path = dir / "deep.png";
    write_bytes(path, kSixteenBitGrayPng, sizeof kSixteenBitGrayPng);
    CHECK_THROWS_AS(load_image(path), FormatError);
    CHECK_THROWS_AS(load_labels(path), FormatError);
}

TEST_CASE("missing and malformed files raise distinct errors") {
    TempDir dir("bad");
    CHECK_THROWS_AS(load_image(dir / "nope.png"), IoError);
    CHECK_THROWS_AS(load_labels(dir / "nope.png"), IoError);

    const auto garbage = dir / "garbage.png";
    std::ofstream(garbage) << "this is not a png";
    CHECK_THROWS_AS(load_image(garbage), FormatError);

    // valid signature, truncated body
    const auto truncated = dir / "trunc.png";
    write_bytes(truncated, kPaletteRgbPng, 40);
    CHECK_THROWS_AS(load_image(truncated), FormatError);
}

TEST_CASE("manifests round trip and resolve paths against their own directory") {
    TempDir dir("manifest");
    std::filesystem::create_directories(dir / "data");
    const ImageDims dims(4, 8);
    for (int k = 0; k < 2; ++k) {
        const std::string n = std::to_string(k);
        save_image(ErpImage(dims, 3), dir.path / "data" / ("img" + n + ".png"));
        save_labels(LabelMap(dims), dir.path / "data" / ("lbl" + n + ".png"));
    }

    DatasetManifest manifest;
    manifest.num_classes = 5;
    manifest.ignore_id = 200;
    manifest.entries = {{"alpha", "data/img0.png", "data/lbl0.png"},
                        {"beta", "data/img1.png", "data/lbl1.png"}};
    const auto mpath = dir / "manifest.json";
    save_manifest(manifest, mpath);

    const DatasetManifest back = load_manifest(mpath);
    CHECK(back.num_classes == 5);
    CHECK(back.ignore_id == 200);
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[0].sample_id == "alpha");
    CHECK(back.entries[1].label_path == std::filesystem::path("data/lbl1.png"));
    CHECK(back.root == dir.path);
    CHECK(std::filesystem::exists(back.resolve_image(back.entries[0])));

    // loading from another working directory must still resolve
    const Dataset ds = load_dataset(back, /*load_images=*/true);
    REQUIRE(ds.samples.size() == 2);
    CHECK(ds.samples[0].image.has_value());
    CHECK(ds.samples[1].labels.dims == dims);
    CHECK(ds.num_classes == 5);
    CHECK(ds.samples[0].labels.ignore_id == 200);
}

TEST_CASE("manifest validation: duplicates, missing files, bad structure") {
    TempDir dir("manifest_bad");
    const ImageDims dims(4, 8);
    save_image(ErpImage(dims, 1), dir / "img.png");
    save_labels(LabelMap(dims), dir / "lbl.png");

    const auto write_manifest = [&](const std::string& body) {
        const auto p = dir / "m.json";
        std::ofstream(p) << body;
        return p;
    };

    const auto dup = write_manifest(R"({"num_classes": 2, "entries": [
        {"sample_id": "a", "image": "img.png", "labels": "lbl.png"},
        {"sample_id": "a", "image": "img.png", "labels": "lbl.png"}]})");
    CHECK_THROWS_AS(load_manifest(dup), ManifestError);

    const auto missing = write_manifest(R"({"num_classes": 2, "entries": [
        {"sample_id": "a", "image": "absent.png", "labels": "lbl.png"}]})");
    CHECK_THROWS_AS(load_manifest(missing), ManifestError);

    const auto no_classes = write_manifest(R"({"entries": []})");
    CHECK_THROWS_AS(load_manifest(no_classes), ManifestError);

    const auto zero_classes = write_manifest(R"({"num_classes": 0, "entries": []})");
    CHECK_THROWS_AS(load_manifest(zero_classes), ManifestError);

    const auto not_json = write_manifest("entries: nope");
    CHECK_THROWS_AS(load_manifest(not_json), ManifestError);

    CHECK_THROWS_AS(load_manifest(dir / "absent.json"), IoError);
}

TEST_CASE("image/label size mismatches are caught at dataset load") {
    TempDir dir("mismatch");
    save_image(ErpImage(ImageDims(4, 8), 1), dir / "img.png");
    save_labels(LabelMap(ImageDims(2, 8)), dir / "lbl.png");
    DatasetManifest manifest;
    manifest.num_classes = 2;
    manifest.root = dir.path;
    manifest.entries = {{"a", "img.png", "lbl.png"}};

    CHECK_THROWS_AS(load_dataset(manifest, /*load_images=*/true), ManifestError);
    // without pixels nothing compares the two rasters
    const Dataset ds = load_dataset(manifest, /*load_images=*/false);
    CHECK_FALSE(ds.samples[0].image.has_value());
}

}  // TEST_SUITE
