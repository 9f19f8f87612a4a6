#include "panosphere/sphere.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "panosphere/error.hpp"

namespace panosphere {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

ImageDims::ImageDims(int height, int width) : h(height), w(width) {
    if (h < 2 || w < 2) {
        throw InvalidArgument("image dims must be at least 2x2, got " + std::to_string(h) + "x" +
                              std::to_string(w));
    }
}

double normalize_lon(double lon) {
    double x = std::fmod(lon, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    if (x >= kTwoPi) x = 0.0;
    return x;
}

SphericalCoord pixel_to_sphere(PixelCoord p, ImageDims dims) {
    if (!std::isfinite(p.i) || !std::isfinite(p.j)) {
        throw InvalidCoordinate("pixel coordinate is not finite");
    }
    if (p.i < 0.0 || p.i >= static_cast<double>(dims.h)) {
        throw InvalidCoordinate("row " + std::to_string(p.i) + " outside [0, " +
                                std::to_string(dims.h) + ")");
    }
    // wrap the column before scaling so huge j stays accurate
    double jm = std::fmod(p.j, static_cast<double>(dims.w));
    if (jm < 0.0) jm += static_cast<double>(dims.w);
    if (jm >= static_cast<double>(dims.w)) jm = 0.0;
    return {kPi * p.i / static_cast<double>(dims.h), kTwoPi * jm / static_cast<double>(dims.w)};
}

PixelCoord sphere_to_pixel(SphericalCoord s, ImageDims dims) {
    if (!std::isfinite(s.lat) || !std::isfinite(s.lon)) {
        throw InvalidCoordinate("spherical coordinate is not finite");
    }
    if (s.lat < 0.0 || s.lat > kPi) {
        throw InvalidCoordinate("latitude " + std::to_string(s.lat) + " outside [0, pi]");
    }
    const double lon = normalize_lon(s.lon);
    return {s.lat * static_cast<double>(dims.h) / kPi,
            lon * static_cast<double>(dims.w) / kTwoPi};
}

UnitVec3 sphere_to_unitvec(SphericalCoord s) {
    const double sl = std::sin(s.lat);
    return {sl * std::cos(s.lon), sl * std::sin(s.lon), std::cos(s.lat)};
}

SphericalCoord unitvec_to_sphere(UnitVec3 v) {
    const double norm = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-9) {
        throw InvalidVector("vector norm " + std::to_string(norm) + " is not 1 within 1e-9");
    }
    double z = v.z;
    if (z > 1.0) z = 1.0;
    if (z < -1.0) z = -1.0;
    const double lat = std::acos(z);
    if (std::abs(std::sin(lat)) < 1e-12) {
        return {lat, 0.0};  // pole: lon is degenerate, canonicalize
    }
    double lon = std::atan2(v.y, v.x);
    if (lon < 0.0) lon += kTwoPi;
    if (lon >= kTwoPi) lon = 0.0;
    return {lat, lon};
}

}  // namespace panosphere
