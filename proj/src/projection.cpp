#include "panosphere/projection.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "panosphere/error.hpp"

namespace panosphere {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pure_z(const RotMat& r) {
    return r(0, 2) == 0.0 && r(1, 2) == 0.0 && r(2, 0) == 0.0 && r(2, 1) == 0.0 && r(2, 2) == 1.0;
}

int wrap_index(long long j, int w) {
    long long m = j % w;
    if (m < 0) m += w;
    return static_cast<int>(m);
}

// 53-bit uniform in [0, 1); one engine call per draw
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

ResampleMap build_rotation_map(ImageDims dims, const RotMat& r) {
    if (dims.h < 2 || dims.w < 2) throw InvalidArgument("rotation map needs valid dims");
    const int h = dims.h;
    const int w = dims.w;
    ResampleMap map;
    map.dims = dims;
    map.src.resize(dims.pixels());

    if (is_pure_z(r)) {
        // Longitude shift: source column j - yaw * w / 2pi, row unchanged.
        const double yaw = std::atan2(r(1, 0), r(0, 0));
        const double shift = yaw / kTwoPi * static_cast<double>(w);
        std::vector<std::uint32_t> cols(static_cast<std::size_t>(w));
        for (int j = 0; j < w; ++j) {
            const long long js = std::llround(static_cast<double>(j) - shift);
            cols[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(wrap_index(js, w));
        }
        for (int i = 0; i < h; ++i) {
            const std::size_t row = static_cast<std::size_t>(i) * w;
            for (int j = 0; j < w; ++j) {
                map.src[row + j] = static_cast<std::uint32_t>(row) + cols[static_cast<std::size_t>(j)];
            }
        }
        return map;
    }

    const RotMat rinv = inverse(r);
    for (int i = 0; i < h; ++i) {
        const double lat = kPi * static_cast<double>(i) / static_cast<double>(h);
        const double sl = std::sin(lat);
        const double cl = std::cos(lat);
        const std::size_t row = static_cast<std::size_t>(i) * w;
        for (int j = 0; j < w; ++j) {
            const double lon = kTwoPi * static_cast<double>(j) / static_cast<double>(w);
            const UnitVec3 v{sl * std::cos(lon), sl * std::sin(lon), cl};
            const UnitVec3 s{rinv(0, 0) * v.x + rinv(0, 1) * v.y + rinv(0, 2) * v.z,
                             rinv(1, 0) * v.x + rinv(1, 1) * v.y + rinv(1, 2) * v.z,
                             rinv(2, 0) * v.x + rinv(2, 1) * v.y + rinv(2, 2) * v.z};
            double z = s.z;
            if (z > 1.0) z = 1.0;
            if (z < -1.0) z = -1.0;
            const double src_lat = std::acos(z);
            double src_lon;
            if (std::abs(std::sin(src_lat)) < 1e-12) {
                src_lon = 0.0;
            } else {
                src_lon = std::atan2(s.y, s.x);
                if (src_lon < 0.0) src_lon += kTwoPi;
                if (src_lon >= kTwoPi) src_lon = 0.0;
            }
            long long si = std::llround(src_lat * static_cast<double>(h) / kPi);
            if (si < 0) si = 0;
            if (si >= h) si = h - 1;
            const long long sj =
                wrap_index(std::llround(src_lon * static_cast<double>(w) / kTwoPi), w);
            map.src[row + j] = static_cast<std::uint32_t>(si * w + sj);
        }
    }
    return map;
}

ErpImage apply_resample(const ErpImage& img, const ResampleMap& map) {
    if (img.dims != map.dims) throw DimensionMismatch("resample map dims do not match image");
    ErpImage out(img.dims, img.channels);
    const int c = img.channels;
    for (std::size_t p = 0; p < map.src.size(); ++p) {
        const std::size_t s = static_cast<std::size_t>(map.src[p]) * c;
        const std::size_t d = p * c;
        for (int k = 0; k < c; ++k) out.data[d + k] = img.data[s + k];
    }
    return out;
}

LabelMap apply_resample(const LabelMap& lbl, const ResampleMap& map) {
    if (lbl.dims != map.dims) throw DimensionMismatch("resample map dims do not match labels");
    LabelMap out(lbl.dims, 0, lbl.ignore_id);
    for (std::size_t p = 0; p < map.src.size(); ++p) {
        out.data[p] = lbl.data[map.src[p]];
    }
    return out;
}

ErpImage rotate_erp(const ErpImage& img, const RotMat& r) {
    return apply_resample(img, build_rotation_map(img.dims, r));
}

LabelMap rotate_labels(const LabelMap& lbl, const RotMat& r) {
    return apply_resample(lbl, build_rotation_map(lbl.dims, r));
}

AugmentationDraw sample_augmentation(const AugmentationConfig& cfg, std::mt19937_64& rng) {
    if (cfg.max_angles.yaw < 0.0 || cfg.max_angles.pitch < 0.0 || cfg.max_angles.roll < 0.0) {
        throw InvalidArgument("augmentation max angles must be nonnegative");
    }
    if (!(cfg.apply_probability >= 0.0 && cfg.apply_probability <= 1.0)) {
        throw InvalidArgument("apply probability must be in [0, 1], got " +
                              std::to_string(cfg.apply_probability));
    }
    const double u_apply = unit_draw(rng);
    const double u_yaw = unit_draw(rng);
    const double u_pitch = unit_draw(rng);
    const double u_roll = unit_draw(rng);
    if (u_apply >= cfg.apply_probability) {
        return {false, {0.0, 0.0, 0.0}};
    }
    return {true,
            {u_yaw * cfg.max_angles.yaw, u_pitch * cfg.max_angles.pitch,
             u_roll * cfg.max_angles.roll}};
}

}  // namespace panosphere
