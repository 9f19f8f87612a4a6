#include "panosphere/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "panosphere/error.hpp"

namespace panosphere {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    // Jump back to the setjmp point; the message is recovered there.
    (void)msg;
    longjmp(png_jmpbuf(png), 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace

PngBuffer read_png(const std::filesystem::path& path, bool allow_palette_expand) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw IoError("png reader allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png info allocation failed");
    }

    std::vector<png_bytep> row_ptrs;
    PngBuffer buf;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": malformed PNG");
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (width == 0 || height == 0) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": zero-sized image");
    }
    if (bit_depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": 16-bit depth is not supported");
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        if (!allow_palette_expand) {
            png_destroy_read_struct(&png, &info, nullptr);
            throw FormatError(path.string() +
                              ": palette PNG not accepted here (class ids would be remapped)");
        }
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": unsupported channel count " +
                          std::to_string(channels));
    }

    buf.width = static_cast<int>(width);
    buf.height = static_cast<int>(height);
    buf.channels = channels;
    buf.pixels.resize(static_cast<std::size_t>(width) * height * channels);
    row_ptrs.resize(height);
    for (png_uint_32 i = 0; i < height; ++i)
        row_ptrs[i] = buf.pixels.data() + static_cast<std::size_t>(i) * width * channels;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return buf;
}

void write_png(const std::filesystem::path& path, const PngBuffer& buf) {
    if (buf.width < 1 || buf.height < 1 || (buf.channels != 1 && buf.channels != 3))
        throw InvalidArgument("png buffer must be non-empty gray or RGB");
    if (buf.pixels.size() !=
        static_cast<std::size_t>(buf.width) * buf.height * buf.channels)
        throw DimensionMismatch("png buffer size does not match its dimensions");

    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + path.string() + " for writing");

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw IoError("png writer allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png info allocation failed");
    }

    std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(buf.height));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("writing " + path.string() + " failed");
    }

    png_init_io(png, fp.get());
    const int color = buf.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, static_cast<png_uint_32>(buf.width),
                 static_cast<png_uint_32>(buf.height), 8, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_NONE);
    png_write_info(png, info);
    for (int i = 0; i < buf.height; ++i)
        row_ptrs[static_cast<std::size_t>(i)] = const_cast<png_bytep>(
            buf.pixels.data() +
            static_cast<std::size_t>(i) * buf.width * buf.channels);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

}  // namespace panosphere
