#include "panosphere/rotation.hpp"

#include <cmath>
#include <numbers>

namespace panosphere {

namespace {
// Part of the exact-reproducibility contract: degrees are converted by
// multiplying with the constant pi/180, and matrix products accumulate
// entries over k in ascending order. Anything matching those two choices
// reproduces these matrices bit for bit.
double deg2rad(double deg) { return deg * (std::numbers::pi / 180.0); }
}  // namespace

RotMat rot_x(double roll_deg) {
    const double c = std::cos(deg2rad(roll_deg));
    const double s = std::sin(deg2rad(roll_deg));
    RotMat r;
    r.m = {1, 0, 0,
           0, c, -s,
           0, s, c};
    return r;
}

RotMat rot_y(double pitch_deg) {
    const double c = std::cos(deg2rad(pitch_deg));
    const double s = std::sin(deg2rad(pitch_deg));
    RotMat r;
    r.m = {c, 0, s,
           0, 1, 0,
           -s, 0, c};
    return r;
}

RotMat rot_z(double yaw_deg) {
    const double c = std::cos(deg2rad(yaw_deg));
    const double s = std::sin(deg2rad(yaw_deg));
    RotMat r;
    r.m = {c, -s, 0,
           s, c, 0,
           0, 0, 1};
    return r;
}

RotMat multiply(const RotMat& a, const RotMat& b) {
    RotMat out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) {
                acc += a(r, k) * b(k, c);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

RotMat compose(const RotationAngles& a) {
    return multiply(rot_z(a.yaw), multiply(rot_y(a.pitch), rot_x(a.roll)));
}

UnitVec3 apply(const RotMat& r, const UnitVec3& v) {
    UnitVec3 out{r(0, 0) * v.x + r(0, 1) * v.y + r(0, 2) * v.z,
                 r(1, 0) * v.x + r(1, 1) * v.y + r(1, 2) * v.z,
                 r(2, 0) * v.x + r(2, 1) * v.y + r(2, 2) * v.z};
    const double norm = std::sqrt(out.x * out.x + out.y * out.y + out.z * out.z);
    if (std::abs(norm - 1.0) > 1e-12 && norm > 0.0) {
        out.x /= norm;
        out.y /= norm;
        out.z /= norm;
    }
    return out;
}

RotMat inverse(const RotMat& r) {
    RotMat out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out(i, j) = r(j, i);
        }
    }
    return out;
}

double determinant(const RotMat& r) {
    return r(0, 0) * (r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1)) -
           r(0, 1) * (r(1, 0) * r(2, 2) - r(1, 2) * r(2, 0)) +
           r(0, 2) * (r(1, 0) * r(2, 1) - r(1, 1) * r(2, 0));
}

bool is_orthonormal(const RotMat& r, double tol) {
    const RotMat rt = inverse(r);
    const RotMat p = multiply(rt, r);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double expect = (i == j) ? 1.0 : 0.0;
            if (std::abs(p(i, j) - expect) > tol) return false;
        }
    }
    return std::abs(determinant(r) - 1.0) <= tol;
}

}  // namespace panosphere
