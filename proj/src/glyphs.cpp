#include "geodiag/glyphs.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace geodiag {

namespace {

GlyphBitmap blank(SymbolClass cls, int w, int h) {
    GlyphBitmap g;
    g.cls = cls;
    g.w = w;
    g.h = h;
    g.bits.assign(static_cast<std::size_t>(w) * h, 0);
    return g;
}

void set_px(GlyphBitmap& g, int x, int y) {
    if (x >= 0 && y >= 0 && x < g.w && y < g.h) g.bits[static_cast<std::size_t>(y) * g.w + x] = 1;
}

// thin stroke between two points, sampled densely
void stroke(GlyphBitmap& g, double x0, double y0, double x1, double y1, double hw = 0.6) {
    double len = std::hypot(x1 - x0, y1 - y0);
    int steps = std::max(2, static_cast<int>(len * 3));
    for (int i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) / steps;
        double cx = x0 + (x1 - x0) * t, cy = y0 + (y1 - y0) * t;
        for (int y = static_cast<int>(cy - hw - 1); y <= cy + hw + 1; ++y)
            for (int x = static_cast<int>(cx - hw - 1); x <= cx + hw + 1; ++x)
                if (std::hypot(x - cx, y - cy) <= hw) set_px(g, x, y);
    }
}

GlyphBitmap make_perpendicular() {
    GlyphBitmap g = blank(SymbolClass::Perpendicular, 10, 10);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 2; ++x) set_px(g, x, y);
    for (int x = 0; x < 10; ++x)
        for (int y = 8; y < 10; ++y) set_px(g, x, y);
    return g;
}

GlyphBitmap make_angle(SymbolClass cls, int arcs) {
    GlyphBitmap g = blank(cls, 15, 15);
    // nested arc ticks fanned from the bottom-left corner
    for (int i = 0; i < arcs; ++i) {
        double r = 4.0 + 2.5 * i;
        for (int y = 0; y < g.h; ++y)
            for (int x = 0; x < g.w; ++x) {
                double dx = x, dy = (g.h - 1) - y;
                double d = std::hypot(dx, dy);
                double ang = std::atan2(dy, dx) * 180.0 / M_PI;
                if (std::abs(d - r) <= 0.75 && ang >= 5.0 && ang <= 85.0) set_px(g, x, y);
            }
    }
    return g;
}

GlyphBitmap make_bar(SymbolClass cls, int ticks) {
    GlyphBitmap g = blank(cls, 2 * ticks - 1, 7);
    for (int i = 0; i < ticks; ++i)
        for (int y = 0; y < 7; ++y) set_px(g, 2 * i, y);
    return g;
}

GlyphBitmap make_parallel(SymbolClass cls, int chevrons) {
    GlyphBitmap g = blank(cls, 5 * chevrons - 1, 9);
    for (int i = 0; i < chevrons; ++i) {
        double x0 = 5.0 * i;
        stroke(g, x0, 0, x0 + 3, 4);
        stroke(g, x0 + 3, 4, x0, 8);
    }
    return g;
}

GlyphBitmap make_head() {
    GlyphBitmap g = blank(SymbolClass::Head, 9, 9);
    // solid triangle, apex to the right
    for (int x = 0; x < 9; ++x) {
        double half = (8 - x) * 0.5;
        for (int y = 0; y < 9; ++y)
            if (std::abs(y - 4.0) <= half) set_px(g, x, y);
    }
    return g;
}

GlyphBitmap make_head_len() {
    GlyphBitmap g = blank(SymbolClass::HeadLen, 11, 9);
    // tailed arrow, apex to the right
    for (int x = 4; x < 11; ++x) {
        double half = (10 - x) * 0.65;
        for (int y = 0; y < 9; ++y)
            if (std::abs(y - 4.0) <= half) set_px(g, x, y);
    }
    for (int x = 0; x < 5; ++x)
        for (int y = 4; y <= 4; ++y) set_px(g, x, y);
    return g;
}

GlyphBitmap rotate90(const GlyphBitmap& g) {
    GlyphBitmap out = blank(g.cls, g.h, g.w);
    out.rot = (g.rot + 90) % 360;
    for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x)
            if (g.at(x, y)) set_px(out, g.h - 1 - y, x);
    return out;
}

std::vector<GlyphBitmap> build_atlas() {
    std::vector<GlyphBitmap> atlas;
    atlas.push_back(make_perpendicular());
    atlas.push_back(make_angle(SymbolClass::Angle, 1));
    atlas.push_back(make_angle(SymbolClass::DoubleAngle, 2));
    atlas.push_back(make_angle(SymbolClass::TripleAngle, 3));
    atlas.push_back(make_angle(SymbolClass::QuadAngle, 4));
    atlas.push_back(make_angle(SymbolClass::PentaAngle, 5));
    atlas.push_back(make_bar(SymbolClass::Bar, 1));
    atlas.push_back(make_bar(SymbolClass::DoubleBar, 2));
    atlas.push_back(make_bar(SymbolClass::TripleBar, 3));
    atlas.push_back(make_bar(SymbolClass::QuadBar, 4));
    atlas.push_back(make_parallel(SymbolClass::Parallel, 1));
    atlas.push_back(make_parallel(SymbolClass::DoubleParallel, 2));
    atlas.push_back(make_parallel(SymbolClass::TripleParallel, 3));
    for (GlyphBitmap g : {make_head(), make_head_len()}) {
        atlas.push_back(g);
        GlyphBitmap r = g;
        for (int i = 0; i < 3; ++i) {
            r = rotate90(r);
            atlas.push_back(r);
        }
    }
    return atlas;
}

}  // namespace

const std::vector<GlyphBitmap>& glyph_atlas() {
    static const std::vector<GlyphBitmap> atlas = build_atlas();
    return atlas;
}

const GlyphBitmap& glyph_for(SymbolClass cls, int rot) {
    for (const auto& g : glyph_atlas())
        if (g.cls == cls && g.rot == rot) return g;
    throw std::invalid_argument(std::string("no glyph for symbol class ") + to_string(cls));
}

// ---------------------------------------------------------------------------
// Classic 5x7 font. Each character is five column bytes, bit 0 on top.

namespace {

const std::map<std::string, std::array<std::uint8_t, 5>>& font_table() {
    static const std::map<std::string, std::array<std::uint8_t, 5>> t = {
        {"0", {0x3E, 0x51, 0x49, 0x45, 0x3E}}, {"1", {0x00, 0x42, 0x7F, 0x40, 0x00}},
        {"2", {0x42, 0x61, 0x51, 0x49, 0x46}}, {"3", {0x21, 0x41, 0x45, 0x4B, 0x31}},
        {"4", {0x18, 0x14, 0x12, 0x7F, 0x10}}, {"5", {0x27, 0x45, 0x45, 0x45, 0x39}},
        {"6", {0x3C, 0x4A, 0x49, 0x49, 0x30}}, {"7", {0x01, 0x71, 0x09, 0x05, 0x03}},
        {"8", {0x36, 0x49, 0x49, 0x49, 0x36}}, {"9", {0x06, 0x49, 0x49, 0x29, 0x1E}},
        {"A", {0x7E, 0x11, 0x11, 0x11, 0x7E}}, {"B", {0x7F, 0x49, 0x49, 0x49, 0x36}},
        {"C", {0x3E, 0x41, 0x41, 0x41, 0x22}}, {"D", {0x7F, 0x41, 0x41, 0x22, 0x1C}},
        {"E", {0x7F, 0x49, 0x49, 0x49, 0x41}}, {"F", {0x7F, 0x09, 0x09, 0x09, 0x01}},
        {"G", {0x3E, 0x41, 0x49, 0x49, 0x7A}}, {"H", {0x7F, 0x08, 0x08, 0x08, 0x7F}},
        {"I", {0x00, 0x41, 0x7F, 0x41, 0x00}}, {"J", {0x20, 0x40, 0x41, 0x3F, 0x01}},
        {"K", {0x7F, 0x08, 0x14, 0x22, 0x41}}, {"L", {0x7F, 0x40, 0x40, 0x40, 0x40}},
        {"M", {0x7F, 0x02, 0x0C, 0x02, 0x7F}}, {"N", {0x7F, 0x04, 0x08, 0x10, 0x7F}},
        {"O", {0x3E, 0x41, 0x41, 0x41, 0x3E}}, {"P", {0x7F, 0x09, 0x09, 0x09, 0x06}},
        {"Q", {0x3E, 0x41, 0x51, 0x21, 0x5E}}, {"R", {0x7F, 0x09, 0x19, 0x29, 0x46}},
        {"S", {0x46, 0x49, 0x49, 0x49, 0x31}}, {"T", {0x01, 0x01, 0x7F, 0x01, 0x01}},
        {"U", {0x3F, 0x40, 0x40, 0x40, 0x3F}}, {"V", {0x1F, 0x20, 0x40, 0x20, 0x1F}},
        {"W", {0x3F, 0x40, 0x38, 0x40, 0x3F}}, {"X", {0x63, 0x14, 0x08, 0x14, 0x63}},
        {"Y", {0x07, 0x08, 0x70, 0x08, 0x07}}, {"Z", {0x61, 0x51, 0x49, 0x45, 0x43}},
        {"a", {0x20, 0x54, 0x54, 0x54, 0x78}}, {"b", {0x7F, 0x48, 0x44, 0x44, 0x38}},
        {"c", {0x38, 0x44, 0x44, 0x44, 0x20}}, {"d", {0x38, 0x44, 0x44, 0x48, 0x7F}},
        {"e", {0x38, 0x54, 0x54, 0x54, 0x18}}, {"f", {0x08, 0x7E, 0x09, 0x01, 0x02}},
        {"g", {0x0C, 0x52, 0x52, 0x52, 0x3E}}, {"h", {0x7F, 0x08, 0x04, 0x04, 0x78}},
        {"i", {0x00, 0x44, 0x7D, 0x40, 0x00}}, {"j", {0x20, 0x40, 0x44, 0x3D, 0x00}},
        {"k", {0x7F, 0x10, 0x28, 0x44, 0x00}}, {"l", {0x00, 0x41, 0x7F, 0x40, 0x00}},
        {"m", {0x7C, 0x04, 0x18, 0x04, 0x78}}, {"n", {0x7C, 0x08, 0x04, 0x04, 0x78}},
        {"o", {0x38, 0x44, 0x44, 0x44, 0x38}}, {"p", {0x7C, 0x14, 0x14, 0x14, 0x08}},
        {"q", {0x08, 0x14, 0x14, 0x18, 0x7C}}, {"r", {0x7C, 0x08, 0x04, 0x04, 0x08}},
        {"s", {0x48, 0x54, 0x54, 0x54, 0x20}}, {"t", {0x04, 0x3F, 0x44, 0x40, 0x20}},
        {"u", {0x3C, 0x40, 0x40, 0x20, 0x7C}}, {"v", {0x1C, 0x20, 0x40, 0x20, 0x1C}},
        {"w", {0x3C, 0x40, 0x30, 0x40, 0x3C}}, {"x", {0x44, 0x28, 0x10, 0x28, 0x44}},
        {"y", {0x0C, 0x50, 0x50, 0x50, 0x3C}}, {"z", {0x44, 0x64, 0x54, 0x4C, 0x44}},
        {"\xC2\xB0", {0x02, 0x05, 0x02, 0x00, 0x00}},  // degree sign
    };
    return t;
}

}  // namespace

std::vector<std::string> font_split(const std::string& utf8) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < utf8.size()) {
        unsigned char c = static_cast<unsigned char>(utf8[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
        if (i + len > utf8.size()) throw std::invalid_argument("truncated utf-8 text");
        std::string ch = utf8.substr(i, len);
        if (!font_table().count(ch)) throw std::invalid_argument("character not in font: '" + ch + "'");
        out.push_back(ch);
        i += len;
    }
    return out;
}

bool font_has(const std::string& utf8_char) { return font_table().count(utf8_char) > 0; }

const std::vector<std::string>& font_charset() {
    static const std::vector<std::string> cs = [] {
        std::vector<std::string> v;
        for (const auto& [ch, cols] : font_table()) v.push_back(ch);
        return v;
    }();
    return cs;
}

std::array<std::uint8_t, kFontW> font_columns(const std::string& utf8_char) {
    auto it = font_table().find(utf8_char);
    if (it == font_table().end())
        throw std::invalid_argument("character not in font: '" + utf8_char + "'");
    return it->second;
}

int text_pixel_width(const std::string& utf8) {
    std::size_t n = font_split(utf8).size();
    return n == 0 ? 0 : static_cast<int>(n) * kFontPitch - 1;
}

BoxPos glyph_box(SymbolClass cls, int rot, const Vec2& center) {
    const GlyphBitmap& g = glyph_for(cls, rot);
    return {center.x - g.w / 2.0, center.y - g.h / 2.0, center.x + g.w / 2.0,
            center.y + g.h / 2.0};
}

BoxPos text_box(const std::string& utf8, const Vec2& center) {
    double w = text_pixel_width(utf8);
    double h = kFontH;
    return {center.x - w / 2.0, center.y - h / 2.0, center.x + w / 2.0, center.y + h / 2.0};
}

}  // namespace geodiag
