#pragma once

#include <cstdint>
#include <vector>

#include "panosphere/image.hpp"

namespace panosphere {

// Per-row panorama weights, stored once per row since every column shares the
// value. Rows are indexed 1-based in the defining formula, so with height H
// the midline rows carry weight 1 and the bottom row exactly 0; the top row
// keeps a small positive weight. That asymmetry comes with the formula and is
// deliberate.
struct WeightMap {
    ImageDims dims;
    std::vector<double> row_weights;  // size dims.h, indexed by 0-based row

    double at(int i, int j) const {
        (void)j;
        return row_weights[static_cast<std::size_t>(i)];
    }
};

// weight(row m, 1-based) = cos(|2m - H| / H * pi/2), in [0, 1].
WeightMap weight_map(ImageDims dims);

struct LossHyper {
    double lambda_w = 0.3;
    double lambda_s = 0.3;
};

// Dense per-pixel class distribution, channel-interleaved.
struct ProbMap {
    ImageDims dims;
    int num_classes = 0;
    std::vector<double> data;

    ProbMap() = default;
    ProbMap(ImageDims d, int classes);                      // zeros
    ProbMap(ImageDims d, int classes, std::vector<double> vals);

    std::size_t index(int i, int j, int c) const {
        return (static_cast<std::size_t>(i) * dims.w + j) * num_classes + c;
    }
    double at(int i, int j, int c) const { return data[index(i, j, c)]; }
};

// Per-pixel loss with an exclusion mask for ignore-labeled pixels.
struct PixelLossMap {
    ImageDims dims;
    std::vector<double> loss;
    std::vector<std::uint8_t> excluded;  // 1 where the pixel does not count

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * dims.w + j;
    }
};

// Cross-entropy of the true class per pixel: -log p(label), with p clamped to
// [1e-12, 1]. Each pixel's distribution must sum to 1 within 1e-6. Pixels
// labeled ignore_id get loss 0 and excluded = 1.
PixelLossMap per_pixel_ce(const ProbMap& probs, const LabelMap& lbl);

// Mean over non-excluded pixels of (1 + lambda_w * weight) * seg, plus
// lambda_s * sdpe_value. With every pixel excluded the segmentation term is
// taken as 0. Both lambdas collapse the result to the plain mean loss at 0.
double combine_losses(const PixelLossMap& seg, const WeightMap& wmap, double sdpe_value,
                      const LossHyper& hyper);

}  // namespace panosphere
