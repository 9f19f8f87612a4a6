#pragma once

#include <filesystem>
#include <vector>

#include "panosphere/image.hpp"

namespace panosphere {

// Patch layout of a deformable patch embedding: rows x cols patches of
// patch x patch pixels each. clamp_factor bounds learnable offsets to
// +/- clamp_factor * rows (row component) and +/- clamp_factor * cols
// (column component).
struct PatchGrid {
    int rows = 0;
    int cols = 0;
    int patch = 0;
    double clamp_factor = 0.0;

    PatchGrid() = default;
    PatchGrid(int patch_rows, int patch_cols, int patch_size, double k);

    std::size_t entries() const {
        return static_cast<std::size_t>(rows) * cols * patch * patch;
    }

    bool operator==(const PatchGrid&) const = default;
};

// Per-patch, per-pixel 2-vector offsets in pixels, relative to each sample's
// base position. Layout: patch-major (m, then n), row-major within each
// patch (i, then j), row component before column component.
struct OffsetField {
    PatchGrid grid;
    std::vector<double> data;

    OffsetField() = default;
    explicit OffsetField(PatchGrid g);                       // zeros
    OffsetField(PatchGrid g, std::vector<double> vals);

    std::size_t index(int m, int n, int i, int j, int comp) const {
        return ((((static_cast<std::size_t>(m) * grid.cols + n) * grid.patch + i) * grid.patch) +
                j) * 2 + comp;
    }
    double row_at(int m, int n, int i, int j) const { return data[index(m, n, i, j, 0)]; }
    double col_at(int m, int n, int i, int j) const { return data[index(m, n, i, j, 1)]; }
};

// Component-wise clamp to the grid's bounds; idempotent.
OffsetField clamp_offsets(const OffsetField& raw);

// Within every patch, entry (i, j) takes entry (i, s-1-j) with the column
// component negated; an involution. Fields equal to their own mirror are
// exactly the left-right symmetric ones.
OffsetField mirror_offsets(const OffsetField& field);

struct LossResult {
    double value = 0.0;
    OffsetField grad;
};

// Sum over all patches and entries of the squared distance between each
// offset and its mirrored counterpart. grad is analytic. With normalize,
// value and grad are divided by the number of summed entries.
LossResult intra_loss(const OffsetField& field, bool normalize = false);

// Component-wise mean over the patch-column index n, one 2-vector per
// (m, i, j); layout ((m * patch + i) * patch + j) * 2 + comp.
std::vector<double> row_average(const OffsetField& field);

// Sum of squared component differences between each offset and its
// patch-row average. The gradient term through the average cancels to zero,
// leaving 2 * (offset - average).
LossResult inter_loss(const OffsetField& field, bool normalize = false);

// intra + inter, values and gradients both.
LossResult sdpe_loss(const OffsetField& field, bool normalize = false);

// Per-patch bilinear sampling of img at base position + offset. Rows clamp
// at the poles, columns wrap. Zero offsets reproduce plain patch extraction.
// Layout: patch-major, then (i, j), then channel.
struct PatchSamples {
    PatchGrid grid;
    int channels = 0;
    std::vector<double> data;

    std::size_t index(int m, int n, int i, int j, int c) const {
        return (((((static_cast<std::size_t>(m) * grid.cols + n) * grid.patch + i) * grid.patch) +
                 j) * channels) + c;
    }
};

PatchSamples deformable_sample(const ErpImage& img, const PatchGrid& grid,
                               const OffsetField& field);

// Text table: header "rows cols patch clamp_factor", then one "row col" pair
// per entry in field order. Binary: "PSOF" magic, u32 dims, f64 clamp + data.
void save_offsets_text(const OffsetField& field, const std::filesystem::path& path);
OffsetField load_offsets_text(const std::filesystem::path& path);
void save_offsets_binary(const OffsetField& field, const std::filesystem::path& path);
OffsetField load_offsets_binary(const std::filesystem::path& path);

}  // namespace panosphere
