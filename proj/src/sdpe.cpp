#include "panosphere/sdpe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "panosphere/error.hpp"

namespace panosphere {

PatchGrid::PatchGrid(int patch_rows, int patch_cols, int patch_size, double k)
    : rows(patch_rows), cols(patch_cols), patch(patch_size), clamp_factor(k) {
    if (rows < 1 || cols < 1 || patch < 1)
        throw InvalidArgument("patch grid dimensions must be positive");
    if (!std::isfinite(clamp_factor) || clamp_factor < 0.0)
        throw InvalidArgument("clamp factor must be finite and non-negative");
}

OffsetField::OffsetField(PatchGrid g) : grid(g), data(g.entries() * 2, 0.0) {}

OffsetField::OffsetField(PatchGrid g, std::vector<double> vals)
    : grid(g), data(std::move(vals)) {
    if (data.size() != grid.entries() * 2)
        throw DimensionMismatch("offset data size does not match patch grid");
    for (double v : data)
        if (!std::isfinite(v)) throw InvalidArgument("offset field contains non-finite value");
}

OffsetField clamp_offsets(const OffsetField& raw) {
    const double row_bound = raw.grid.clamp_factor * raw.grid.rows;
    const double col_bound = raw.grid.clamp_factor * raw.grid.cols;
    OffsetField out = raw;
    for (std::size_t k = 0; k + 1 < out.data.size(); k += 2) {
        out.data[k] = std::clamp(out.data[k], -row_bound, row_bound);
        out.data[k + 1] = std::clamp(out.data[k + 1], -col_bound, col_bound);
    }
    return out;
}

OffsetField mirror_offsets(const OffsetField& field) {
    const PatchGrid& g = field.grid;
    OffsetField out(g);
    for (int m = 0; m < g.rows; ++m)
        for (int n = 0; n < g.cols; ++n)
            for (int i = 0; i < g.patch; ++i)
                for (int j = 0; j < g.patch; ++j) {
                    const int jm = g.patch - 1 - j;
                    out.data[out.index(m, n, i, j, 0)] = field.row_at(m, n, i, jm);
                    out.data[out.index(m, n, i, j, 1)] = -field.col_at(m, n, i, jm);
                }
    return out;
}

LossResult intra_loss(const OffsetField& field, bool normalize) {
    const OffsetField mirrored = mirror_offsets(field);
    LossResult res;
    res.grad = OffsetField(field.grid);
    for (std::size_t k = 0; k < field.data.size(); ++k) {
        const double d = field.data[k] - mirrored.data[k];
        res.value += d * d;
        // d/dx ||(I - S)x||^2 = 2 (I - S)^T (I - S) x = 4 (I - S) x, because the
        // mirror is a self-adjoint involution.
        res.grad.data[k] = 4.0 * d;
    }
    if (normalize) {
        const double n = static_cast<double>(field.grid.entries());
        res.value /= n;
        for (double& gv : res.grad.data) gv /= n;
    }
    return res;
}

std::vector<double> row_average(const OffsetField& field) {
    const PatchGrid& g = field.grid;
    std::vector<double> avg(static_cast<std::size_t>(g.rows) * g.patch * g.patch * 2, 0.0);
    for (int m = 0; m < g.rows; ++m)
        for (int n = 0; n < g.cols; ++n)
            for (int i = 0; i < g.patch; ++i)
                for (int j = 0; j < g.patch; ++j)
                    for (int c = 0; c < 2; ++c) {
                        const std::size_t a =
                            ((static_cast<std::size_t>(m) * g.patch + i) * g.patch + j) * 2 + c;
                        avg[a] += field.data[field.index(m, n, i, j, c)];
                    }
    for (double& v : avg) v /= g.cols;
    return avg;
}

LossResult inter_loss(const OffsetField& field, bool normalize) {
    const PatchGrid& g = field.grid;
    const std::vector<double> avg = row_average(field);
    LossResult res;
    res.grad = OffsetField(g);
    for (int m = 0; m < g.rows; ++m)
        for (int n = 0; n < g.cols; ++n)
            for (int i = 0; i < g.patch; ++i)
                for (int j = 0; j < g.patch; ++j)
                    for (int c = 0; c < 2; ++c) {
                        const std::size_t a =
                            ((static_cast<std::size_t>(m) * g.patch + i) * g.patch + j) * 2 + c;
                        const double d = field.data[field.index(m, n, i, j, c)] - avg[a];
                        res.value += d * d;
                        // The average itself depends on every offset in the patch
                        // row, but the extra chain term sums deviations from the
                        // mean and so vanishes; 2 * (x - avg) is exact.
                        res.grad.data[res.grad.index(m, n, i, j, c)] = 2.0 * d;
                    }
    if (normalize) {
        const double n = static_cast<double>(g.entries());
        res.value /= n;
        for (double& gv : res.grad.data) gv /= n;
    }
    return res;
}

LossResult sdpe_loss(const OffsetField& field, bool normalize) {
    LossResult intra = intra_loss(field, normalize);
    const LossResult inter = inter_loss(field, normalize);
    intra.value += inter.value;
    for (std::size_t k = 0; k < intra.grad.data.size(); ++k)
        intra.grad.data[k] += inter.grad.data[k];
    return intra;
}

namespace {

// Bilinear fetch with the panorama boundary rules: rows clamp, columns wrap.
double sample_bilinear(const ErpImage& img, double r, double c, int ch) {
    const int h = img.dims.h;
    const int w = img.dims.w;
    r = std::clamp(r, 0.0, static_cast<double>(h - 1));
    c = c - std::floor(c / w) * w;  // into [0, w)
    if (c >= w) c = 0.0;
    const int r0 = static_cast<int>(r);
    const int r1 = std::min(r0 + 1, h - 1);
    const int c0 = static_cast<int>(c);
    const int c1 = (c0 + 1) % w;
    const double fr = r - r0;
    const double fc = c - c0;
    const double top = img.at(r0, c0, ch) * (1.0 - fc) + img.at(r0, c1, ch) * fc;
    const double bot = img.at(r1, c0, ch) * (1.0 - fc) + img.at(r1, c1, ch) * fc;
    return top * (1.0 - fr) + bot * fr;
}

}  // namespace

PatchSamples deformable_sample(const ErpImage& img, const PatchGrid& grid,
                               const OffsetField& field) {
    if (field.grid != grid)
        throw DimensionMismatch("offset field does not match the requested patch grid");
    if (static_cast<long long>(grid.rows) * grid.patch > img.dims.h ||
        static_cast<long long>(grid.cols) * grid.patch > img.dims.w)
        throw DimensionMismatch("patch grid does not fit inside the image");

    PatchSamples out;
    out.grid = grid;
    out.channels = img.channels;
    out.data.resize(grid.entries() * img.channels);
    for (int m = 0; m < grid.rows; ++m)
        for (int n = 0; n < grid.cols; ++n)
            for (int i = 0; i < grid.patch; ++i)
                for (int j = 0; j < grid.patch; ++j) {
                    const double r =
                        static_cast<double>(m) * grid.patch + i + field.row_at(m, n, i, j);
                    const double c =
                        static_cast<double>(n) * grid.patch + j + field.col_at(m, n, i, j);
                    for (int ch = 0; ch < img.channels; ++ch)
                        out.data[out.index(m, n, i, j, ch)] = sample_bilinear(img, r, c, ch);
                }
    return out;
}

void save_offsets_text(const OffsetField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.precision(17);
    out << field.grid.rows << ' ' << field.grid.cols << ' ' << field.grid.patch << ' '
        << field.grid.clamp_factor << '\n';
    for (std::size_t k = 0; k + 1 < field.data.size(); k += 2)
        out << field.data[k] << ' ' << field.data[k + 1] << '\n';
    if (!out) throw IoError("write to " + path.string() + " failed");
}

OffsetField load_offsets_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    int rows = 0, cols = 0, patch = 0;
    double k = 0.0;
    if (!(in >> rows >> cols >> patch >> k))
        throw FormatError(path.string() + ": bad offset header");
    PatchGrid grid;
    try {
        grid = PatchGrid(rows, cols, patch, k);
    } catch (const Error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    std::vector<double> vals(grid.entries() * 2);
    for (double& v : vals)
        if (!(in >> v)) throw FormatError(path.string() + ": truncated offset table");
    return OffsetField(grid, std::move(vals));
}

namespace {
constexpr char kOffsetMagic[4] = {'P', 'S', 'O', 'F'};
}

void save_offsets_binary(const OffsetField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(kOffsetMagic, 4);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(field.grid.rows),
                                   static_cast<std::uint32_t>(field.grid.cols),
                                   static_cast<std::uint32_t>(field.grid.patch)};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(&field.grid.clamp_factor), sizeof(double));
    out.write(reinterpret_cast<const char*>(field.data.data()),
              static_cast<std::streamsize>(field.data.size() * sizeof(double)));
    if (!out) throw IoError("write to " + path.string() + " failed");
}

OffsetField load_offsets_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kOffsetMagic, 4) != 0)
        throw FormatError(path.string() + ": not an offset field file");
    std::uint32_t dims[3] = {};
    double k = 0.0;
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    in.read(reinterpret_cast<char*>(&k), sizeof k);
    if (!in) throw FormatError(path.string() + ": truncated offset header");
    PatchGrid grid;
    try {
        grid = PatchGrid(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                         static_cast<int>(dims[2]), k);
    } catch (const Error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    std::vector<double> vals(grid.entries() * 2);
    in.read(reinterpret_cast<char*>(vals.data()),
            static_cast<std::streamsize>(vals.size() * sizeof(double)));
    if (!in) throw FormatError(path.string() + ": truncated offset table");
    return OffsetField(grid, std::move(vals));
}

}  // namespace panosphere
