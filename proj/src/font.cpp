#include "supertml/font.hpp"

#include <string_view>

namespace supertml {

namespace {

// Row art for 0x20..0x7E, six rows of three columns each. '#' is ink.
constexpr std::string_view kGlyphArt[95] = {
    "..................",  // ' '
    ".#..#..#.....#....",  // !
    "#.##.#............",  // "
    "#.#####.#####.#...",  // #
    ".####..#..####....",  // $
    "#....#.#.#....#...",  // %
    ".#.#.#.#.#.#.##...",  // &
    ".#..#.............",  // '
    "..#.#..#..#...#...",  // (
    "#...#..#..#.#.....",  // )
    "...#.#.#.#.#......",  // *
    "....#.###.#.......",  // +
    ".............#.#..",  // ,
    "......###.........",  // -
    ".............#....",  // .
    "..#..#.#.#..#.....",  // /
    "####.##.##.####...",  // 0
    ".#.##..#..#.###...",  // 1
    "##...#.#.#..###...",  // 2
    "##...#.#...###....",  // 3
    "#.##.####..#..#...",  // 4
    "####..##...###....",  // 5
    ".###..####.####...",  // 6
    "###..#.#.#..#.....",  // 7
    "####.#####.####...",  // 8
    "####.####..###....",  // 9
    "....#.....#.......",  // :
    "....#.....#.#.....",  // ;
    "..#.#.#...#...#...",  // <
    "...###...###......",  // =
    "#...#...#.#.#.....",  // >
    "##...#.#.....#....",  // ?
    ".#.#.#####...##...",  // @
    ".#.#.#####.##.#...",  // A
    "##.#.###.#.###....",  // B
    ".###..#..#...##...",  // C
    "##.#.##.##.###....",  // D
    "####..####..###...",  // E
    "####..####..#.....",  // F
    ".###..#.##.#.##...",  // G
    "#.##.#####.##.#...",  // H
    "###.#..#..#.###...",  // I
    "..#..#..##.#.#....",  // J
    "#.##.###.#.##.#...",  // K
    "#..#..#..#..###...",  // L
    "#.########.##.#...",  // M
    "#.###########.#...",  // N
    ".#.#.##.##.#.#....",  // O
    "##.#.###.#..#.....",  // P
    ".#.#.##.####.##...",  // Q
    "##.#.###.##.#.#...",  // R
    ".###...#...###....",  // S
    "###.#..#..#..#....",  // T
    "#.##.##.##.#.##...",  // U
    "#.##.##.#.#..#....",  // V
    "#.##.########.#...",  // W
    "#.##.#.#.#.##.#...",  // X
    "#.##.#.#..#..#....",  // Y
    "###..#.#.#..###...",  // Z
    "####..#..#..###...",  // [
    "#..#...#...#..#...",  // backslash
    "###..#..#..####...",  // ]
    ".#.#.#............",  // ^
    "............###...",  // _
    "#...#.............",  // `
    "...##..###.####...",  // a
    "#..##.#.##.###....",  // b
    "....###..#...##...",  // c
    "..#.###.##.#.##...",  // d
    "....###.###..##...",  // e
    "..#.#.###.#..#....",  // f
    "....###.####..###.",  // g
    "#..##.#.##.##.#...",  // h
    ".#.....#..#..#....",  // i
    "..#.....#..##.#.#.",  // j
    "#..#.###.##.#.#...",  // k
    "##..#..#..#.###...",  // l
    "...##########.#...",  // m
    "...##.#.##.##.#...",  // n
    "....#.#.##.#.#....",  // o
    "...##.#.##.###.#..",  // p
    "....###.##.#.##..#",  // q
    "....###..#..#.....",  // r
    "....####..####....",  // s
    ".#.###.#..#...#...",  // t
    "...#.##.##.#.##...",  // u
    "...#.##.##.#.#....",  // v
    "...#.##.#######...",  // w
    "...#.#.#..#.#.#...",  // x
    "...#.##.#.##..###.",  // y
    "...###.####.###...",  // z
    ".##.#.##..#..##...",  // {
    ".#..#..#..#..#....",  // |
    "##..#..##.#.##....",  // }
    "...##..##.........",  // ~
};

constexpr GlyphFont::Bitmap parse_art(std::string_view art) {
    GlyphFont::Bitmap rows{};
    for (int y = 0; y < GlyphFont::kRefHeight; ++y) {
        std::uint8_t bits = 0;
        for (int x = 0; x < 3; ++x) {
            if (art[static_cast<std::size_t>(y * 3 + x)] == '#') bits |= static_cast<std::uint8_t>(1u << (GlyphFont::kRefWidth - 1 - x));
        }
        rows[static_cast<std::size_t>(y)] = bits;
    }
    return rows;
}

}  // namespace

GlyphFont::GlyphFont() {
    for (std::size_t i = 0; i < ascii_.size(); ++i) ascii_[i] = parse_art(kGlyphArt[i]);
    replacement_ = parse_art("##################");
}

const GlyphFont& GlyphFont::builtin() {
    static const GlyphFont font;
    return font;
}

const GlyphFont::Bitmap& GlyphFont::bitmap(char32_t cp) const noexcept {
    return has_glyph(cp) ? ascii_[cp - 0x20] : replacement_;
}

bool GlyphFont::ink(char32_t cp, int font_size, int dx, int dy) const noexcept {
    const int w = advance(font_size);
    if (dx < 0 || dy < 0 || dx >= w || dy >= font_size) return false;
    const int sx = dx * kRefWidth / w;
    const int sy = dy * kRefHeight / font_size;
    return (bitmap(cp)[static_cast<std::size_t>(sy)] >> (kRefWidth - 1 - sx)) & 1u;
}

}  // namespace supertml
