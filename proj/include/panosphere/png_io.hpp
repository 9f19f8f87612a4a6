#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace panosphere {

// Raw 8-bit PNG pixels, row-major, channel-interleaved. channels is 1 (gray)
// or 3 (RGB); alpha is stripped on read, 16-bit depth is rejected.
struct PngBuffer {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;

    std::size_t index(int i, int j, int c) const {
        return (static_cast<std::size_t>(i) * width + j) * static_cast<std::size_t>(channels) +
               c;
    }
};

// allow_palette_expand: palette images are expanded to RGB when true and
// rejected when false (label maps must store raw class ids, and a palette
// would silently remap them).
PngBuffer read_png(const std::filesystem::path& path, bool allow_palette_expand);

// Fixed filter and compression settings so identical buffers produce
// byte-identical files.
void write_png(const std::filesystem::path& path, const PngBuffer& buf);

}  // namespace panosphere
