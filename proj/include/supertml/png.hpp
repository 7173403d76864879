#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "supertml/render.hpp"

namespace supertml {

/// 8-bit grayscale PNG with fixed encoder settings (filter 0 on every row,
/// zlib level 9, no ancillary chunks), so equal images give equal bytes.
std::vector<std::uint8_t> encode_png(const RasterImage& image);

/// Reads the subset of PNG this library writes: 8-bit grayscale,
/// non-interlaced, any row filter. Throws DataError otherwise.
RasterImage decode_png(std::span<const std::uint8_t> bytes);

}  // namespace supertml
