#pragma once

#include <array>

#include "panosphere/sphere.hpp"

namespace panosphere {

// Yaw/pitch/roll in degrees, stored exactly as given. Degrees are converted
// to radians only inside matrix construction.
struct RotationAngles {
    double yaw = 0.0;    // about the polar z axis
    double pitch = 0.0;  // about y
    double roll = 0.0;   // about x
};

// Row-major 3x3 rotation matrix. Matrices built by rot_x/rot_y/rot_z,
// multiply, compose and inverse satisfy R^T R = I and det R = 1 to 1e-12.
struct RotMat {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int r, int c) const { return m[static_cast<std::size_t>(r) * 3 + c]; }
    double& operator()(int r, int c) { return m[static_cast<std::size_t>(r) * 3 + c]; }

    static RotMat identity() { return RotMat{}; }

    bool operator==(const RotMat&) const = default;
};

RotMat rot_x(double roll_deg);
RotMat rot_y(double pitch_deg);
RotMat rot_z(double yaw_deg);

// a * b with each entry accumulated over k = 0, 1, 2 in ascending order.
RotMat multiply(const RotMat& a, const RotMat& b);

// R = R_z(yaw) * (R_y(pitch) * R_x(roll)), evaluated in exactly that order.
RotMat compose(const RotationAngles& a);

// R v, renormalized when the result drifts from unit norm by more than 1e-12.
UnitVec3 apply(const RotMat& r, const UnitVec3& v);

// Transpose; the inverse for orthonormal matrices.
RotMat inverse(const RotMat& r);

double determinant(const RotMat& r);
bool is_orthonormal(const RotMat& r, double tol = 1e-12);

}  // namespace panosphere
