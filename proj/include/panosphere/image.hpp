#pragma once

#include <cstdint>
#include <vector>

#include "panosphere/sphere.hpp"

namespace panosphere {

// Continuous-valued equirectangular raster, row-major with interleaved
// channels. Loaded 8-bit images are scaled to [0, 1]; all values finite.
struct ErpImage {
    ImageDims dims;
    int channels = 0;
    std::vector<double> data;

    ErpImage() = default;
    ErpImage(ImageDims d, int num_channels);                            // zero-filled
    ErpImage(ImageDims d, int num_channels, std::vector<double> vals);  // validates size + finiteness

    std::size_t index(int i, int j, int c) const {
        return (static_cast<std::size_t>(i) * dims.w + j) * channels + c;
    }
    double at(int i, int j, int c) const { return data[index(i, j, c)]; }
    double& at(int i, int j, int c) { return data[index(i, j, c)]; }
    bool empty() const { return data.empty(); }
};

// Integer class-id raster. Values are class ids (< the task's class count)
// or ignore_id, which metrics and losses skip.
struct LabelMap {
    ImageDims dims;
    std::vector<std::uint8_t> data;
    std::uint8_t ignore_id = 255;

    LabelMap() = default;
    LabelMap(ImageDims d, std::uint8_t fill = 0, std::uint8_t ignore = 255);
    LabelMap(ImageDims d, std::vector<std::uint8_t> vals, std::uint8_t ignore = 255);

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * dims.w + j; }
    std::uint8_t at(int i, int j) const { return data[index(i, j)]; }
    std::uint8_t& at(int i, int j) { return data[index(i, j)]; }

    bool operator==(const LabelMap&) const = default;
};

}  // namespace panosphere
