#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "panosphere/error.hpp"
#include "panosphere/rotation.hpp"

using namespace panosphere;

namespace {

// Same conversion expression the library commits to: degrees times the
// constant pi/180 (not deg*pi then /180, which can differ in the last bit).
double rad(double deg) { return deg * (std::numbers::pi / 180.0); }

// Independent re-statement of the three axis matrices and their product,
// using the same entry-by-entry accumulation order the library documents.
// Keeping this local copy literal is the point: compose() must agree with it
// down to the last bit.
RotMat oracle_axis_z(double deg) {
    const double c = std::cos(rad(deg)), s = std::sin(rad(deg));
    RotMat r;
    r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
    return r;
}
RotMat oracle_axis_y(double deg) {
    const double c = std::cos(rad(deg)), s = std::sin(rad(deg));
    RotMat r;
    r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
    return r;
}
RotMat oracle_axis_x(double deg) {
    const double c = std::cos(rad(deg)), s = std::sin(rad(deg));
    RotMat r;
    r.m = {1, 0, 0, 0, c, -s, 0, s, c};
    return r;
}
RotMat oracle_mul(const RotMat& a, const RotMat& b) {
    RotMat out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += a(r, k) * b(k, c);
            out(r, c) = acc;
        }
    return out;
}

}  // namespace

TEST_SUITE("rotation") {

TEST_CASE("axis matrices carry the textbook signs") {
    const RotMat z = rot_z(30.0);
    CHECK(z(0, 0) == doctest::Approx(std::sqrt(3.0) / 2));
    CHECK(z(0, 1) == doctest::Approx(-0.5));
    CHECK(z(1, 0) == doctest::Approx(0.5));
    CHECK(z(2, 2) == 1.0);

    const RotMat y = rot_y(30.0);
    CHECK(y(0, 2) == doctest::Approx(0.5));
    CHECK(y(2, 0) == doctest::Approx(-0.5));
    CHECK(y(1, 1) == 1.0);

    const RotMat x = rot_x(30.0);
    CHECK(x(1, 2) == doctest::Approx(-0.5));
    CHECK(x(2, 1) == doctest::Approx(0.5));
    CHECK(x(0, 0) == 1.0);
}

TEST_CASE("compose equals the brute-force triple product bit for bit") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> angle(-360.0, 360.0);
    for (int t = 0; t < 500; ++t) {
        const double yaw = angle(rng), pitch = angle(rng), roll = angle(rng);
        const RotMat got = compose({yaw, pitch, roll});
        const RotMat want =
            oracle_mul(oracle_axis_z(yaw), oracle_mul(oracle_axis_y(pitch), oracle_axis_x(roll)));
        CHECK(got == want);  // exact equality, no tolerance
    }
}

TEST_CASE("rotation matrices stay orthonormal with unit determinant") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> angle(-720.0, 720.0);
    for (int t = 0; t < 500; ++t) {
        const RotMat r = compose({angle(rng), angle(rng), angle(rng)});
        CHECK(is_orthonormal(r, 1e-12));
        CHECK(std::abs(determinant(r) - 1.0) < 1e-12);
    }
}

TEST_CASE("zero angles give the exact identity") {
    CHECK(compose({0.0, 0.0, 0.0}) == RotMat::identity());
}

TEST_CASE("pure yaw keeps the exact zeros the shift reduction relies on") {
    // compose(yaw, 0, 0) must match rot_z(yaw) exactly, with hard zeros in
    // the third row and column; the longitude-shift fast path tests those
    // entries with == and would silently fall back to resampling otherwise.
    for (double yaw : {0.0, 33.7, 90.0, 180.0, 270.0, -45.0}) {
        const RotMat r = compose({yaw, 0.0, 0.0});
        CHECK(r == rot_z(yaw));
        CHECK(r(0, 2) == 0.0);
        CHECK(r(1, 2) == 0.0);
        CHECK(r(2, 0) == 0.0);
        CHECK(r(2, 1) == 0.0);
        CHECK(r(2, 2) == 1.0);
    }
}

TEST_CASE("applying rot_z(90) sends x to y") {
    const UnitVec3 v = apply(rot_z(90.0), {1.0, 0.0, 0.0});
    CHECK(v.x == doctest::Approx(0.0));
    CHECK(v.y == doctest::Approx(1.0));
    CHECK(v.z == doctest::Approx(0.0));
}

TEST_CASE("inverse is the transpose and undoes apply") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(-180.0, 180.0);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const RotMat r = compose({angle(rng), angle(rng), angle(rng)});
        const RotMat ri = inverse(r);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) CHECK(ri(a, b) == r(b, a));

        double x = coord(rng), y = coord(rng), z = coord(rng);
        const double n = std::sqrt(x * x + y * y + z * z);
        if (n < 1e-6) continue;
        const UnitVec3 v{x / n, y / n, z / n};
        const UnitVec3 back = apply(ri, apply(r, v));
        CHECK(back.x == doctest::Approx(v.x).epsilon(1e-12));
        CHECK(back.y == doctest::Approx(v.y).epsilon(1e-12));
        CHECK(back.z == doctest::Approx(v.z).epsilon(1e-12));
    }
}

TEST_CASE("angles are taken in degrees") {
    // 360 degrees is a full turn: cos/sin of the exact radian conversion
    const RotMat r = rot_z(360.0);
    CHECK(r(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r(0, 1)) < 1e-12);
}

}  // TEST_SUITE
