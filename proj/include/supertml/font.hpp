#pragma once

#include <array>
#include <cstdint>

namespace supertml {

/// Fixed-advance bitmap font compiled into the library.
///
/// Every printable ASCII character has a 4x6 reference bitmap (3 ink columns
/// plus one spacing column, 5 rows plus one descender row). A glyph drawn at
/// font size `f` occupies an `advance(f) x f` box and is scaled from the
/// reference by nearest-neighbour lookup in integer arithmetic. Sizes at or
/// above the reference height only ever upscale, so distinct reference glyphs
/// stay distinct on the canvas.
class GlyphFont {
public:
    static constexpr int kRefWidth = 4;
    static constexpr int kRefHeight = 6;
    /// Smallest size at which the planners will place text.
    static constexpr int kMinLegibleSize = 6;

    using Bitmap = std::array<std::uint8_t, kRefHeight>;  // bit (kRefWidth-1-x) of row y

    static const GlyphFont& builtin();

    /// Horizontal advance in pixels at the given size: round(f * 4 / 6).
    static constexpr int advance(int font_size) noexcept {
        return (kRefWidth * font_size + kRefHeight / 2) / kRefHeight;
    }

    bool has_glyph(char32_t cp) const noexcept { return cp >= 0x20 && cp <= 0x7E; }
    /// Reference bitmap; codepoints outside printable ASCII get the replacement box.
    const Bitmap& bitmap(char32_t cp) const noexcept;
    /// Whether pixel (dx, dy) of the glyph box at `font_size` is inked.
    bool ink(char32_t cp, int font_size, int dx, int dy) const noexcept;

private:
    GlyphFont();

    std::array<Bitmap, 95> ascii_{};
    Bitmap replacement_{};
};

}  // namespace supertml
