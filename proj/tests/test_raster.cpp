#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "geodiag/glyphs.hpp"
#include "geodiag/raster.hpp"

using namespace geodiag;

static GroundTruthScene line_scene(double x1, double y1, double x2, double y2,
                                   LineStyle style = LineStyle::Solid) {
    GroundTruthScene s;
    s.width = 128;
    s.height = 128;
    GeoPrimitive p;
    p.id = "P0";
    p.cls = GeoClass::Point;
    p.pos = PointPos{x1, y1};
    s.prims.points.push_back(p);
    p.id = "P1";
    p.pos = PointPos{x2, y2};
    s.prims.points.push_back(p);
    GeoPrimitive l;
    l.id = "L0";
    l.cls = GeoClass::Line;
    l.pos = LinePos{x1, y1, x2, y2};
    l.endpoints = {"P0", "P1"};
    l.line_style = style;
    s.prims.lines.push_back(l);
    return s;
}

TEST_CASE("a stroked segment leaves the expected band of ink") {
    GroundTruthScene s = line_scene(10, 10, 100, 10);
    GrayImage img = rasterize(s);
    const auto& mask = s.prims.lines[0].mask;
    REQUIRE(mask.has_value());
    std::size_t area = mask->area();
    CHECK(area >= 172);
    CHECK(area <= 192);  // about 91 x 2 px

    auto px = mask->decode();
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x)
            if (px[std::size_t(y) * 128 + x])
                CHECK(dist_point_line({x + 0.5, y + 0.5}, s.prims.lines[0].as_line()) <= 1.51);

    // the image shows exactly the union of the geo masks
    std::vector<char> un(img.pixels.size(), 0);
    for (const auto* list : {&s.prims.points, &s.prims.lines})
        for (const auto& g : *list) {
            REQUIRE(g.mask.has_value());
            auto m = g.mask->decode();
            for (std::size_t i = 0; i < m.size(); ++i) un[i] |= m[i];
        }
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        CHECK((img.pixels[i] < 128) == bool(un[i]));
}

TEST_CASE("empty scene renders to a blank page") {
    GroundTruthScene s;
    s.width = 64;
    s.height = 48;
    GrayImage img = rasterize(s);
    CHECK(img.width == 64);
    CHECK(img.height == 48);
    for (auto v : img.pixels) CHECK(v == 255);
}

TEST_CASE("circle ink stays inside the annulus") {
    GroundTruthScene s;
    s.width = 200;
    s.height = 200;
    GeoPrimitive c;
    c.id = "C0";
    c.cls = GeoClass::Circle;
    c.pos = CirclePos{100, 100, 50};
    s.prims.circles.push_back(c);
    rasterize(s);
    REQUIRE(s.prims.circles[0].mask.has_value());
    auto px = s.prims.circles[0].mask->decode();
    std::size_t n = 0;
    for (int y = 0; y < 200; ++y)
        for (int x = 0; x < 200; ++x)
            if (px[std::size_t(y) * 200 + x]) {
                ++n;
                double d = std::hypot(x + 0.5 - 100, y + 0.5 - 100);
                CHECK(std::abs(d - 50) <= 1.5);
            }
    CHECK(n > 400);
}

TEST_CASE("dash and solid cover the same span with less ink") {
    GroundTruthScene solid = line_scene(10, 60, 110, 60);
    GroundTruthScene dash = line_scene(10, 60, 110, 60, LineStyle::Dash);
    rasterize(solid);
    rasterize(dash);
    double s_area = double(solid.prims.lines[0].mask->area());
    double d_area = double(dash.prims.lines[0].mask->area());
    CHECK(d_area < 0.75 * s_area);
    CHECK(d_area > 0.4 * s_area);  // 6 on / 4 off
}

TEST_CASE("masks agree with the standalone mask builders") {
    GroundTruthScene s = line_scene(20, 20, 90, 75);
    rasterize(s);
    RleMask direct = segment_mask(128, 128, s.prims.lines[0].as_line(), 2.0);
    CHECK(direct == *s.prims.lines[0].mask);

    GroundTruthScene c;
    c.width = 128;
    c.height = 128;
    GeoPrimitive g;
    g.id = "C0";
    g.cls = GeoClass::Circle;
    g.pos = CirclePos{60, 60, 30};
    c.prims.circles.push_back(g);
    rasterize(c);
    CHECK(circle_mask(128, 128, CirclePos{60, 60, 30}, 2.0) == *c.prims.circles[0].mask);
}

TEST_CASE("render_image leaves the scene untouched") {
    GroundTruthScene s = line_scene(10, 10, 100, 10);
    GrayImage a = render_image(s);
    CHECK_FALSE(s.prims.lines[0].mask.has_value());
    GrayImage b = rasterize(s);
    CHECK(a.pixels == b.pixels);
}

TEST_CASE("blur stays in range and spreads edges") {
    GroundTruthScene s = line_scene(10, 30, 100, 30);
    GrayImage img = render_image(s);
    GrayImage soft = gaussian_blur(img, 1.0);
    REQUIRE(soft.width == img.width);
    REQUIRE(soft.height == img.height);
    int hard_extreme = 0, soft_extreme = 0;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        hard_extreme += img.pixels[i] == 0 || img.pixels[i] == 255;
        soft_extreme += soft.pixels[i] == 0 || soft.pixels[i] == 255;
    }
    CHECK(soft_extreme < hard_extreme);  // grays appeared at the edges
    // ink mass roughly conserved
    double sum_a = 0, sum_b = 0;
    for (auto v : img.pixels) sum_a += 255 - v;
    for (auto v : soft.pixels) sum_b += 255 - v;
    CHECK(std::abs(sum_a - sum_b) / sum_a < 0.05);
}

TEST_CASE("glyph atlas covers every renderable mark") {
    std::set<SymbolClass> seen;
    for (const auto& g : glyph_atlas()) {
        CHECK(g.w > 0);
        CHECK(g.h > 0);
        std::size_t ink = 0;
        for (auto b : g.bits) ink += b;
        CHECK(ink > 0);
        seen.insert(g.cls);
    }
    for (auto cls : {SymbolClass::Perpendicular, SymbolClass::Head, SymbolClass::HeadLen,
                     SymbolClass::Angle, SymbolClass::DoubleAngle, SymbolClass::TripleAngle,
                     SymbolClass::QuadAngle, SymbolClass::PentaAngle, SymbolClass::Bar,
                     SymbolClass::DoubleBar, SymbolClass::TripleBar, SymbolClass::QuadBar,
                     SymbolClass::Parallel, SymbolClass::DoubleParallel, SymbolClass::TripleParallel})
        CHECK(seen.count(cls));

    // arrow heads come in four orientations
    std::set<int> rots;
    for (const auto& g : glyph_atlas())
        if (g.cls == SymbolClass::Head) rots.insert(g.rot);
    CHECK(rots.size() == 4);

    const GlyphBitmap& perp = glyph_for(SymbolClass::Perpendicular);
    BoxPos box = glyph_box(SymbolClass::Perpendicular, 0, {50, 50});
    CHECK(box.width() == doctest::Approx(perp.w));
    CHECK(box.height() == doctest::Approx(perp.h));
    CHECK(box.center().x == doctest::Approx(50));
}

TEST_CASE("bitmap font basics") {
    CHECK(font_has("A"));
    CHECK(font_has("7"));
    CHECK(font_has("\xC2\xB0"));  // degree sign
    CHECK_FALSE(font_has("~"));
    CHECK(text_pixel_width("30") == 11);  // 5 + 1 + 5
    CHECK(font_split("124\xC2\xB0").size() == 4);
    CHECK_THROWS_AS(font_split("a~b"), std::invalid_argument);
    for (const auto& ch : font_charset()) {
        auto cols = font_columns(ch);
        int ink = 0;
        for (auto c : cols) ink += __builtin_popcount(c);
        if (ch != " ") CHECK(ink > 0);
    }
    BoxPos tb = text_box("30", {40, 40});
    CHECK(tb.width() == doctest::Approx(11));
    CHECK(tb.height() == doctest::Approx(7));
}

TEST_CASE("symbols and texts put ink inside their boxes") {
    GroundTruthScene s;
    s.width = 96;
    s.height = 96;
    NonGeoPrimitive sym;
    sym.id = "S0";
    sym.kind = NonGeoPrimitive::Kind::Symbol;
    sym.symbol_class = SymbolClass::Perpendicular;
    sym.box = glyph_box(SymbolClass::Perpendicular, 0, {30, 30});
    s.prims.symbols.push_back(sym);
    NonGeoPrimitive txt;
    txt.id = "T0";
    txt.kind = NonGeoPrimitive::Kind::Text;
    txt.content = "AB";
    txt.text_class = TextClass::Point;
    txt.box = text_box("AB", {60, 60});
    s.prims.texts.push_back(txt);

    GrayImage img = rasterize(s);
    int inside = 0, outside = 0;
    for (int y = 0; y < 96; ++y)
        for (int x = 0; x < 96; ++x) {
            if (img.at(x, y) >= 128) continue;
            bool in_sym = x + 0.5 >= sym.box.x1 - 0.5 && x + 0.5 <= sym.box.x2 + 0.5 &&
                          y + 0.5 >= sym.box.y1 - 0.5 && y + 0.5 <= sym.box.y2 + 0.5;
            bool in_txt = x + 0.5 >= txt.box.x1 - 0.5 && x + 0.5 <= txt.box.x2 + 0.5 &&
                          y + 0.5 >= txt.box.y1 - 0.5 && y + 0.5 <= txt.box.y2 + 0.5;
            (in_sym || in_txt) ? ++inside : ++outside;
        }
    CHECK(outside == 0);
    CHECK(inside > 10);
}
