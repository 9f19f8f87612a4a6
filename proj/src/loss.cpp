#include "panosphere/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "panosphere/error.hpp"

namespace panosphere {

WeightMap weight_map(ImageDims dims) {
    WeightMap out;
    out.dims = dims;
    out.row_weights.resize(static_cast<std::size_t>(dims.h));
    const double h = static_cast<double>(dims.h);
    for (int i = 0; i < dims.h; ++i) {
        const double m = static_cast<double>(i) + 1.0;  // 1-based row index
        const double ratio = std::abs(2.0 * m - h) / h;  // in [0, 1]
        // cos(pi/2) lands ~6e-17 off in floating point; the boundary row is
        // defined to be exactly 0, so snap it.
        const double w =
            ratio >= 1.0 ? 0.0 : std::clamp(std::cos(ratio * (std::numbers::pi / 2.0)), 0.0, 1.0);
        out.row_weights[static_cast<std::size_t>(i)] = w;
    }
    return out;
}

ProbMap::ProbMap(ImageDims d, int classes) : dims(d), num_classes(classes) {
    if (classes < 1) throw InvalidArgument("probability map needs at least one class");
    data.assign(d.pixels() * static_cast<std::size_t>(classes), 0.0);
}

ProbMap::ProbMap(ImageDims d, int classes, std::vector<double> vals)
    : dims(d), num_classes(classes), data(std::move(vals)) {
    if (classes < 1) throw InvalidArgument("probability map needs at least one class");
    if (data.size() != d.pixels() * static_cast<std::size_t>(classes))
        throw DimensionMismatch("probability data size does not match dims * classes");
    for (double v : data)
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidArgument("probabilities must be finite and non-negative");
}

PixelLossMap per_pixel_ce(const ProbMap& probs, const LabelMap& lbl) {
    if (!(probs.dims == lbl.dims))
        throw DimensionMismatch("probability map and label map differ in size");

    PixelLossMap out;
    out.dims = probs.dims;
    out.loss.assign(probs.dims.pixels(), 0.0);
    out.excluded.assign(probs.dims.pixels(), 0);

    for (int i = 0; i < probs.dims.h; ++i)
        for (int j = 0; j < probs.dims.w; ++j) {
            const std::size_t p = out.index(i, j);
            const std::uint8_t label = lbl.at(i, j);
            if (label == lbl.ignore_id) {
                out.excluded[p] = 1;
                continue;
            }
            if (label >= probs.num_classes)
                throw InvalidArgument("label id " + std::to_string(label) +
                                      " outside the class range");
            double sum = 0.0;
            for (int c = 0; c < probs.num_classes; ++c) sum += probs.at(i, j, c);
            if (std::abs(sum - 1.0) > 1e-6)
                throw InvalidArgument("pixel distribution does not sum to 1");
            const double prob = std::clamp(probs.at(i, j, label), 1e-12, 1.0);
            out.loss[p] = -std::log(prob);
        }
    return out;
}

double combine_losses(const PixelLossMap& seg, const WeightMap& wmap, double sdpe_value,
                      const LossHyper& hyper) {
    if (!(seg.dims == wmap.dims))
        throw DimensionMismatch("loss map and weight map differ in size");
    if (!std::isfinite(hyper.lambda_w) || hyper.lambda_w < 0.0 ||
        !std::isfinite(hyper.lambda_s) || hyper.lambda_s < 0.0)
        throw InvalidArgument("loss hyperparameters must be finite and non-negative");
    if (!std::isfinite(sdpe_value))
        throw InvalidArgument("offset-constraint loss value must be finite");

    double total = 0.0;
    std::size_t counted = 0;
    for (int i = 0; i < seg.dims.h; ++i) {
        const double w = wmap.row_weights[static_cast<std::size_t>(i)];
        for (int j = 0; j < seg.dims.w; ++j) {
            const std::size_t p = seg.index(i, j);
            if (seg.excluded[p]) continue;
            total += (1.0 + hyper.lambda_w * w) * seg.loss[p];
            ++counted;
        }
    }
    const double seg_term = counted ? total / static_cast<double>(counted) : 0.0;
    return seg_term + hyper.lambda_s * sdpe_value;
}

}  // namespace panosphere
