#pragma once

#include <stdexcept>
#include <string>

namespace panosphere {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidCoordinate : Error {
    using Error::Error;
};

struct InvalidVector : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct UndefinedMetric : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// malformed or unsupported file contents (wrong bit depth, palette labels, ...)
struct FormatError : Error {
    using Error::Error;
};

struct ManifestError : Error {
    using Error::Error;
};

struct PredictorError : Error {
    using Error::Error;
};

}  // namespace panosphere
