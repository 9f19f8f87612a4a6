#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "panosphere/image.hpp"
#include "panosphere/rotation.hpp"

namespace panosphere {

// Pull-based resampling table: for every output pixel, the flat index of the
// nearest source pixel. Rounding is half-away-from-zero after the longitude
// wrap; the latitude row is clamped to [0, h-1], columns wrap modulo w.
struct ResampleMap {
    ImageDims dims;
    std::vector<std::uint32_t> src;

    std::uint32_t source_of(int i, int j) const {
        return src[static_cast<std::size_t>(i) * dims.w + j];
    }
};

// Build the output -> source lookup for rotating an ERP raster on the sphere:
// each output pixel is mapped to the sphere, moved by R^-1, and mapped back.
// Pure z-axis rotations (identity included) reduce to an exact longitude
// shift with the latitude row untouched, so yaw by a multiple of 360/w
// degrees is a bit-exact column shift.
ResampleMap build_rotation_map(ImageDims dims, const RotMat& r);

ErpImage rotate_erp(const ErpImage& img, const RotMat& r);
LabelMap rotate_labels(const LabelMap& lbl, const RotMat& r);

ErpImage apply_resample(const ErpImage& img, const ResampleMap& map);
LabelMap apply_resample(const LabelMap& lbl, const ResampleMap& map);

// Training-time augmentation policy: with apply_probability, draw each angle
// uniformly from [0, max]. max_angles holds the per-axis maxima.
struct AugmentationConfig {
    RotationAngles max_angles{360.0, 10.0, 10.0};
    double apply_probability = 0.5;
};

struct AugmentationDraw {
    bool applied = false;
    RotationAngles angles;
};

// Consumes exactly 4 engine draws per call (1 Bernoulli + 3 uniforms), also
// when the draw is not applied, so seeded streams stay aligned across
// policies. The rng is externally owned; use one per worker.
AugmentationDraw sample_augmentation(const AugmentationConfig& cfg, std::mt19937_64& rng);

}  // namespace panosphere
