#include "panosphere/image.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "panosphere/error.hpp"

namespace panosphere {

ErpImage::ErpImage(ImageDims d, int num_channels) : dims(d), channels(num_channels) {
    if (channels < 1) throw InvalidArgument("image needs at least one channel");
    data.assign(dims.pixels() * static_cast<std::size_t>(channels), 0.0);
}

ErpImage::ErpImage(ImageDims d, int num_channels, std::vector<double> vals)
    : dims(d), channels(num_channels), data(std::move(vals)) {
    if (channels < 1) throw InvalidArgument("image needs at least one channel");
    const std::size_t expect = dims.pixels() * static_cast<std::size_t>(channels);
    if (data.size() != expect) {
        throw DimensionMismatch("image data size " + std::to_string(data.size()) +
                                " does not match " + std::to_string(expect));
    }
    for (double v : data) {
        if (!std::isfinite(v)) throw InvalidArgument("image data contains non-finite values");
    }
}

LabelMap::LabelMap(ImageDims d, std::uint8_t fill, std::uint8_t ignore)
    : dims(d), data(d.pixels(), fill), ignore_id(ignore) {}

LabelMap::LabelMap(ImageDims d, std::vector<std::uint8_t> vals, std::uint8_t ignore)
    : dims(d), data(std::move(vals)), ignore_id(ignore) {
    if (data.size() != dims.pixels()) {
        throw DimensionMismatch("label data size " + std::to_string(data.size()) +
                                " does not match " + std::to_string(dims.pixels()));
    }
}

}  // namespace panosphere
