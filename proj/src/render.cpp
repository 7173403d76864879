#include "supertml/render.hpp"

#include <fmt/format.h>

#include "supertml/error.hpp"
#include "supertml/text.hpp"

namespace supertml {

namespace {

void check_cell_on_canvas(const RasterImage& canvas, const CellSpec& cell) {
    if (cell.x < 0 || cell.y < 0 || cell.width < 0 || cell.height < 0 || cell.right() > canvas.width ||
        cell.bottom() > canvas.height)
        throw RenderOverflow(fmt::format("cell {},{} {}x{} is not on the {}x{} canvas", cell.x, cell.y, cell.width,
                                         cell.height, canvas.width, canvas.height));
}

void draw_glyph(RasterImage& canvas, char32_t cp, int x0, int y0, int size, const GlyphFont& font, std::uint8_t ink) {
    const int w = GlyphFont::advance(size);
    for (int dy = 0; dy < size; ++dy)
        for (int dx = 0; dx < w; ++dx)
            if (font.ink(cp, size, dx, dy)) canvas.at(x0 + dx, y0 + dy) = ink;
}

}  // namespace

void render_text(RasterImage& canvas, const CellSpec& cell, std::string_view text, const GlyphFont& font,
                 std::uint8_t ink) {
    const auto chars = decode_utf8(text);
    if (chars.empty()) return;
    check_cell_on_canvas(canvas, cell);
    const int size = cell.font_size;
    const int adv = GlyphFont::advance(size);
    const int per_line = size > 0 && adv > 0 ? cell.width / adv : 0;
    const int max_lines = size > 0 ? std::min(cell.lines, cell.height / size) : 0;
    if (per_line < 1 || max_lines < 1 ||
        chars.size() > static_cast<std::size_t>(per_line) * static_cast<std::size_t>(max_lines))
        throw RenderOverflow(fmt::format("{} characters do not fit a {}x{} cell at {} px on {} line(s)", chars.size(),
                                         cell.width, cell.height, size, cell.lines));
    for (std::size_t k = 0; k < chars.size(); ++k) {
        const int line = static_cast<int>(k) / per_line;
        const int col = static_cast<int>(k) % per_line;
        draw_glyph(canvas, chars[k], cell.x + col * adv, cell.y + line * size, size, font, ink);
    }
}

void render_sew(RasterImage& canvas, const CellSpec& cell, std::string_view word, const GlyphFont& font,
                std::uint8_t ink) {
    const auto chars = decode_utf8(word);
    if (chars.empty()) return;
    check_cell_on_canvas(canvas, cell);
    if (cell.width != cell.height)
        throw RenderOverflow(fmt::format("squared-word cell must be square, got {}x{}", cell.width, cell.height));
    const int g = sew_grid_arity(chars.size());
    const int slot = cell.width / g;
    if (slot < 1)
        throw RenderOverflow(fmt::format("{} characters need a {}x{} grid, cell is only {} px", chars.size(), g, g,
                                         cell.width));
    for (std::size_t k = 0; k < chars.size(); ++k) {
        const int row = static_cast<int>(k) / g;
        const int col = static_cast<int>(k) % g;
        draw_glyph(canvas, chars[k], cell.x + col * slot, cell.y + row * slot, slot, font, ink);
    }
}

RasterImage render_sample(const Sample& sample, const LayoutPlan& plan, const TabularSchema& schema,
                          const FormatOptions& options, const GlyphFont& font) {
    const std::size_t n = plan.cells.size();
    if (sample.values.size() != n || schema.feature_count() != n)
        throw DataError(fmt::format("sample has {} values, schema {} features, plan {} cells", sample.values.size(),
                                    schema.feature_count(), n));
    RasterImage image(plan.canvas.side, plan.canvas.side, plan.canvas.background);
    for (std::size_t f = 0; f < n; ++f) {
        const CellSpec& cell = plan.cells[f];
        const std::string text = format_value(sample.values[f], options.for_feature(schema, f)).text;
        try {
            if (cell.sew)
                render_sew(image, cell, text, font, plan.canvas.foreground);
            else
                render_text(image, cell, text, font, plan.canvas.foreground);
        } catch (const RenderOverflow& e) {
            throw RenderOverflow(fmt::format("feature {} ('{}'): {}", f, schema.feature(f).name, e.what()));
        }
    }
    return image;
}

}  // namespace supertml
