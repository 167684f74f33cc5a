#pragma once

#include <cstdint>
#include <filesystem>

#include "fogsim/raster.hpp"

namespace fogsim {

enum class ImageEncoding { jpeg, png };

struct WriteOptions {
    ImageEncoding encoding = ImageEncoding::jpeg;
    int jpeg_quality = 95;
};

/// Decodes an 8-bit color image into RGB doubles (value / 255, no gamma).
RasterImage read_image(const std::filesystem::path& path);

/// Quantizes to 8 bits (round-half-up after clamping to [0,1]) and encodes.
void write_image(const std::filesystem::path& path, const RasterImage& image,
                 const WriteOptions& options);

/// Writes a [0,1] scalar field as an 8-bit grayscale PNG.
void write_gray_png(const std::filesystem::path& path, const ScalarGrid& grid);

std::uint8_t quantize_u8(double v) noexcept;

}  // namespace fogsim
