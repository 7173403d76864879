#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "supertml/font.hpp"
#include "supertml/format.hpp"
#include "supertml/ingest.hpp"
#include "supertml/layout.hpp"

namespace supertml {

/// Single-channel 8-bit image, row-major.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    RasterImage() = default;
    RasterImage(int w, int h, std::uint8_t fill)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const RasterImage&) const = default;
};

/// Draws `text` left to right from the cell's top-left corner at the cell's
/// font size, wrapping onto at most `cell.lines` lines. Throws RenderOverflow
/// instead of clipping. Pixels outside the cell are never written.
void render_text(RasterImage& canvas, const CellSpec& cell, std::string_view text, const GlyphFont& font,
                 std::uint8_t ink);

/// Squared English Word: the characters of `word` fill a g x g grid
/// (g = ceil(sqrt(length))) spanning the whole square cell, row-major.
void render_sew(RasterImage& canvas, const CellSpec& cell, std::string_view word, const GlyphFont& font,
                std::uint8_t ink);

/// Renders one sample onto a fresh canvas according to the plan.
RasterImage render_sample(const Sample& sample, const LayoutPlan& plan, const TabularSchema& schema,
                          const FormatOptions& options, const GlyphFont& font = GlyphFont::builtin());

}  // namespace supertml
