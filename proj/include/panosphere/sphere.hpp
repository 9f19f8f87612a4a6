#pragma once

#include <cstddef>

namespace panosphere {

// Raster dimensions of an equirectangular image. A standard ERP frame has
// w = 2h; other aspect ratios are legal but flagged via standard_aspect()
// so callers can warn.
struct ImageDims {
    int h = 0;
    int w = 0;

    ImageDims() = default;
    ImageDims(int height, int width);  // throws InvalidArgument unless h >= 2 and w >= 2

    bool standard_aspect() const { return w == 2 * h; }
    std::size_t pixels() const { return static_cast<std::size_t>(h) * static_cast<std::size_t>(w); }

    bool operator==(const ImageDims&) const = default;
};

// lat is colatitude in [0, pi]: 0 at the north pole (image row 0), pi at the
// south pole. lon grows eastward with the column index, normalized to [0, 2*pi).
struct SphericalCoord {
    double lat = 0.0;
    double lon = 0.0;
};

// Right-handed frame with z as the polar (yaw) axis and x pointing at lon 0.
struct UnitVec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Continuous pixel coordinates in raw-index convention: i in [0, h), j any
// finite value (operations wrap the column). No half-pixel center offset.
struct PixelCoord {
    double i = 0.0;
    double j = 0.0;
};

// lat = pi * i / h, lon = (2*pi * j / w) mod 2*pi.
SphericalCoord pixel_to_sphere(PixelCoord p, ImageDims dims);

// Exact inverse: i = lat * h / pi, j = lon * w / (2*pi).
PixelCoord sphere_to_pixel(SphericalCoord s, ImageDims dims);

// (sin lat cos lon, sin lat sin lon, cos lat).
UnitVec3 sphere_to_unitvec(SphericalCoord s);

// lat = acos(clamp(z)); lon = atan2(y, x) normalized to [0, 2*pi).
// At the poles (|sin lat| < 1e-12) lon is canonicalized to 0.
// Throws InvalidVector if the input norm deviates from 1 by more than 1e-9.
SphericalCoord unitvec_to_sphere(UnitVec3 v);

double normalize_lon(double lon);  // into [0, 2*pi)

}  // namespace panosphere
