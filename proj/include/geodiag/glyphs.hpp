#pragma once

// Built-in marks and lettering: the symbol glyph atlas shared by the
// renderer and the detector, and a 5x7 bitmap font.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geodiag/geom.hpp"

namespace geodiag {

struct GlyphBitmap {
    SymbolClass cls = SymbolClass::Unknown;
    int rot = 0;  // degrees, arrow heads come in four orientations
    int w = 0;
    int h = 0;
    std::vector<std::uint8_t> bits;  // row-major 0/1

    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * w + x]; }
};

// Every renderable mark (one entry per class, four per arrow head class).
const std::vector<GlyphBitmap>& glyph_atlas();

// The atlas entry for a class at rotation 0.
const GlyphBitmap& glyph_for(SymbolClass cls, int rot = 0);

// ---------------------------------------------------------------------------
// Font: 5 columns x 7 rows per character, one blank column between characters.

inline constexpr int kFontW = 5;
inline constexpr int kFontH = 7;
inline constexpr int kFontPitch = 6;

// Splits utf-8 text into characters the font knows (ascii + degree sign).
// Throws std::invalid_argument on characters outside the font.
std::vector<std::string> font_split(const std::string& utf8);

bool font_has(const std::string& utf8_char);
std::array<std::uint8_t, kFontW> font_columns(const std::string& utf8_char);  // bit 0 = top row

// Every character the font knows, in table order.
const std::vector<std::string>& font_charset();

// Pixel width of a rendered string (6 per char minus the final gap).
int text_pixel_width(const std::string& utf8);

// Boxes for placement: glyph or text centered at a point.
BoxPos glyph_box(SymbolClass cls, int rot, const Vec2& center);
BoxPos text_box(const std::string& utf8, const Vec2& center);

}  // namespace geodiag
