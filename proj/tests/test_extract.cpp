#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "geodiag/extract.hpp"
#include "geodiag/glyphs.hpp"
#include "geodiag/raster.hpp"
#include "geodiag/synth.hpp"

using namespace geodiag;

namespace {

GroundTruthScene one_line(double x1, double y1, double x2, double y2, int w = 128, int h = 128,
                          LineStyle style = LineStyle::Solid) {
    GroundTruthScene s;
    s.width = w;
    s.height = h;
    GeoPrimitive l;
    l.id = "L0";
    l.cls = GeoClass::Line;
    l.pos = LinePos{x1, y1, x2, y2};
    l.line_style = style;
    s.prims.lines.push_back(l);
    return s;
}

GroundTruthScene one_circle(double cx, double cy, double r, int w = 200, int h = 200) {
    GroundTruthScene s;
    s.width = w;
    s.height = h;
    GeoPrimitive c;
    c.id = "C0";
    c.cls = GeoClass::Circle;
    c.pos = CirclePos{cx, cy, r};
    s.prims.circles.push_back(c);
    return s;
}

int component_count(const BinaryMap& m) {
    std::vector<char> seen(m.bits.size(), 0);
    int comps = 0;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            if (!m.get(x, y) || seen[std::size_t(y) * m.width + x]) continue;
            ++comps;
            std::queue<std::pair<int, int>> q;
            q.push({x, y});
            seen[std::size_t(y) * m.width + x] = 1;
            while (!q.empty()) {
                auto [cx, cy] = q.front();
                q.pop();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = cx + dx, ny = cy + dy;
                        if (!m.get(nx, ny) || seen[std::size_t(ny) * m.width + nx]) continue;
                        seen[std::size_t(ny) * m.width + nx] = 1;
                        q.push({nx, ny});
                    }
            }
        }
    return comps;
}

}  // namespace

TEST_CASE("binarize keeps exactly the dark pixels") {
    GrayImage blank;
    blank.width = 16;
    blank.height = 16;
    blank.pixels.assign(256, 255);
    CHECK(binarize(blank, 128).count() == 0);

    GroundTruthScene s = one_line(10, 10, 100, 10);
    GrayImage img = rasterize(s);
    BinaryMap bin = binarize(img, 128);
    CHECK(bin.count() == s.prims.lines[0].mask->area());
    CHECK(binarize(img, 0).count() == 0);  // nothing is darker than 0
}

TEST_CASE("skeleton of a thick bar is its one pixel centreline") {
    BinaryMap bar(64, 16);
    for (int y = 7; y <= 8; ++y)
        for (int x = 5; x <= 58; ++x) bar.at(x, y) = 1;
    BinaryMap skel = skeletonize(bar);
    CHECK(skel.count() >= 50);
    CHECK(skel.count() <= 56);
    int min_x = 64, max_x = -1;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 64; ++x)
            if (skel.get(x, y)) {
                CHECK((y == 7 || y == 8));
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                // one pixel wide: no vertical neighbour pair
                CHECK_FALSE((skel.get(x, y - 1) && skel.get(x, y + 1)));
            }
    CHECK(min_x <= 6);
    CHECK(max_x >= 57);
    CHECK(component_count(skel) == 1);

    CHECK(skeletonize(BinaryMap(8, 8)).count() == 0);

    BinaryMap blob(14, 14);
    for (int y = 2; y < 12; ++y)
        for (int x = 2; x < 12; ++x) blob.at(x, y) = 1;
    BinaryMap bs = skeletonize(blob);
    CHECK(bs.count() > 0);
    CHECK(bs.count() < blob.count());
    for (int y = 0; y < 14; ++y)
        for (int x = 0; x < 14; ++x)
            if (bs.get(x, y)) CHECK(blob.get(x, y));
    CHECK(component_count(bs) == 1);
}

TEST_CASE("circle detection recovers centre and radius") {
    ExtractionConfig cfg;
    GroundTruthScene s = one_circle(100, 100, 50);
    BinaryMap skel = skeletonize(binarize(rasterize(s), cfg.binarize_threshold));
    CircleDetection det = detect_circles(skel, cfg);
    REQUIRE(det.circles.size() == 1);
    CHECK(std::hypot(det.circles[0].pos.x - 100, det.circles[0].pos.y - 100) <= 1.0);
    CHECK(std::abs(det.circles[0].pos.r - 50) <= 1.0);
    CHECK_FALSE(det.circles[0].arc);
    CHECK(det.residue.count() < skel.count() / 10);
}

TEST_CASE("lines alone never hallucinate a circle") {
    ExtractionConfig cfg;
    GroundTruthScene s = one_line(10, 20, 110, 30);
    GeoPrimitive l2;
    l2.id = "L1";
    l2.cls = GeoClass::Line;
    l2.pos = LinePos{15, 100, 120, 40};
    s.prims.lines.push_back(l2);
    BinaryMap skel = skeletonize(binarize(rasterize(s), cfg.binarize_threshold));
    CircleDetection det = detect_circles(skel, cfg);
    CHECK(det.circles.empty());
    CHECK(det.residue.count() == skel.count());
}

TEST_CASE("two circles are found separately") {
    ExtractionConfig cfg;
    GroundTruthScene s;
    s.width = 256;
    s.height = 160;
    GeoPrimitive c;
    c.cls = GeoClass::Circle;
    c.id = "C0";
    c.pos = CirclePos{70, 80, 40};
    s.prims.circles.push_back(c);
    c.id = "C1";
    c.pos = CirclePos{180, 80, 55};
    s.prims.circles.push_back(c);
    BinaryMap skel = skeletonize(binarize(rasterize(s), cfg.binarize_threshold));
    CircleDetection det = detect_circles(skel, cfg);
    REQUIRE(det.circles.size() == 2);
    auto close = [&](const FittedCircle& f, double x, double y, double r) {
        return std::hypot(f.pos.x - x, f.pos.y - y) <= 1.0 && std::abs(f.pos.r - r) <= 1.0;
    };
    bool a0 = close(det.circles[0], 70, 80, 40) && close(det.circles[1], 180, 80, 55);
    bool a1 = close(det.circles[0], 180, 80, 55) && close(det.circles[1], 70, 80, 40);
    CHECK((a0 || a1));
}

TEST_CASE("segment endpoints land within two pixels") {
    ExtractionConfig cfg;
    GroundTruthScene s = one_line(12, 14, 101, 88);
    BinaryMap skel = skeletonize(binarize(rasterize(s), cfg.binarize_threshold));
    auto segs = detect_segments(skel, cfg);
    REQUIRE(segs.size() == 1);
    LinePos got = segs[0].pos;
    double d0 = std::min(std::hypot(got.x1 - 12, got.y1 - 14), std::hypot(got.x2 - 12, got.y2 - 14));
    double d1 = std::min(std::hypot(got.x1 - 101, got.y1 - 88), std::hypot(got.x2 - 101, got.y2 - 88));
    CHECK(d0 <= 2.0);
    CHECK(d1 <= 2.0);
    CHECK_FALSE(segs[0].pixels.empty());
}

TEST_CASE("a dashed stroke merges into one full extent segment") {
    ExtractionConfig cfg;
    GroundTruthScene s = one_line(10, 40, 118, 40, 128, 80, LineStyle::Dash);
    BinaryMap skel = skeletonize(binarize(rasterize(s), cfg.binarize_threshold));
    auto segs = detect_segments(skel, cfg);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].style == LineStyle::Dash);
    double len = std::hypot(segs[0].pos.x2 - segs[0].pos.x1, segs[0].pos.y2 - segs[0].pos.y1);
    CHECK(len >= 100.0);
}

TEST_CASE("a plus sign is two segments, not four") {
    ExtractionConfig cfg;
    GroundTruthScene s = one_line(20, 60, 100, 60);
    GeoPrimitive l2;
    l2.id = "L1";
    l2.cls = GeoClass::Line;
    l2.pos = LinePos{60, 20, 60, 100};
    s.prims.lines.push_back(l2);
    BinaryMap skel = skeletonize(binarize(rasterize(s), cfg.binarize_threshold));
    auto segs = detect_segments(skel, cfg);
    CHECK(segs.size() == 2);
}

TEST_CASE("derived points: crossing, endpoints, tangency") {
    ExtractionConfig cfg;
    FittedSegment h, v;
    h.pos = LinePos{20, 60, 100, 60};
    v.pos = LinePos{60, 20, 60, 100};
    auto pts = detect_points({h, v}, {}, cfg);
    CHECK(pts.size() == 5);  // four ends and the crossing
    int crossings = 0;
    for (const auto& p : pts) {
        if (p.on_lines.size() == 2) {
            ++crossings;
            CHECK(std::hypot(p.xy.x - 60, p.xy.y - 60) <= 0.5);
            CHECK(p.kind == PointKind::Intersection);
            CHECK(p.endpoint_of.empty());
        } else {
            CHECK(p.endpoint_of.size() == 1);
        }
    }
    CHECK(crossings == 1);

    auto two = detect_points({h}, {}, cfg);
    CHECK(two.size() == 2);
    for (const auto& p : two) CHECK(p.endpoint_of.size() == 1);

    // a segment ending on a circle: the shared point is on both
    FittedCircle c;
    c.pos = CirclePos{60, 60, 30};
    FittedSegment touch;
    touch.pos = LinePos{60, 90, 60, 120};
    auto mix = detect_points({touch}, {c}, cfg);
    bool found = false;
    for (const auto& p : mix)
        if (!p.on_circles.empty() && !p.endpoint_of.empty()) {
            found = true;
            CHECK(std::hypot(p.xy.x - 60, p.xy.y - 90) <= 1.0);
        }
    CHECK(found);
}

TEST_CASE("derived points never crowd each other") {
    ExtractionConfig cfg;
    SceneConfig sc;
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
        GroundTruthScene s = sample_scene(sc, seed);
        std::vector<FittedSegment> segs;
        for (const auto& l : s.prims.lines) {
            FittedSegment f;
            f.pos = l.as_line();
            segs.push_back(f);
        }
        std::vector<FittedCircle> circ;
        for (const auto& c : s.prims.circles) {
            FittedCircle f;
            f.pos = c.as_circle();
            circ.push_back(f);
        }
        auto pts = detect_points(segs, circ, cfg);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                CHECK(std::hypot(pts[i].xy.x - pts[j].xy.x, pts[i].xy.y - pts[j].xy.y) >=
                      cfg.point_merge_dist);
    }
}

TEST_CASE("residual ink decodes into symbols and text") {
    ExtractionConfig cfg;
    GroundTruthScene s;
    s.width = 160;
    s.height = 120;
    NonGeoPrimitive sym;
    sym.id = "S0";
    sym.kind = NonGeoPrimitive::Kind::Symbol;
    sym.symbol_class = SymbolClass::Perpendicular;
    sym.box = glyph_box(SymbolClass::Perpendicular, 0, {40, 60});
    s.prims.symbols.push_back(sym);
    NonGeoPrimitive txt;
    txt.id = "T0";
    txt.kind = NonGeoPrimitive::Kind::Text;
    txt.content = "30";
    txt.text_class = TextClass::Degree;
    txt.box = text_box("30", {110, 60});
    s.prims.texts.push_back(txt);

    GrayImage img = render_image(s);
    BinaryMap bin = binarize(img, cfg.binarize_threshold);
    BinaryMap empty_geo(bin.width, bin.height);
    auto found = detect_nongeo(img, bin, empty_geo, cfg);
    REQUIRE(found.size() == 2);
    const NonGeoPrimitive* fs = nullptr;
    const NonGeoPrimitive* ft = nullptr;
    for (const auto& p : found)
        (p.kind == NonGeoPrimitive::Kind::Symbol ? fs : ft) = &p;
    REQUIRE(fs);
    REQUIRE(ft);
    CHECK(fs->symbol_class == SymbolClass::Perpendicular);
    CHECK(ft->content == "30");
    CHECK(box_iou(fs->box, sym.box) > 0.6);
    CHECK(box_iou(ft->box, txt.box) > 0.6);

    // everything already explained: nothing left to classify
    CHECK(detect_nongeo(img, bin, bin, cfg).empty());
}

TEST_CASE("mean shift merges nearby samples") {
    auto labels = mean_shift({{0.0}, {0.1}, {5.0}, {5.1}}, 1.0);
    REQUIRE(labels.size() == 4);
    CHECK(labels[0] == labels[1]);
    CHECK(labels[2] == labels[3]);
    CHECK(labels[0] != labels[2]);
    CHECK(std::set<int>(labels.begin(), labels.end()) == std::set<int>{0, 1});

    CHECK(mean_shift({{3.0, 4.0}}, 2.0) == std::vector<int>{0});

    auto same = mean_shift({{1.0}, {1.0}, {1.0}}, 0.5);
    CHECK(same == std::vector<int>(3, 0));

    // permuting samples permutes labels consistently
    std::vector<std::vector<double>> pts = {{0.0}, {9.0}, {0.2}, {9.3}};
    auto l1 = mean_shift(pts, 1.0);
    std::vector<std::vector<double>> rev(pts.rbegin(), pts.rend());
    auto l2 = mean_shift(rev, 1.0);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j)
            CHECK((l1[i] == l1[j]) == (l2[pts.size() - 1 - i] == l2[pts.size() - 1 - j]));
}

TEST_CASE("extraction on clean renders round trips the geometry") {
    ExtractionConfig cfg;
    SceneConfig sc = []() {
        SceneConfig c;
        c.w_perp = c.w_angle = c.w_bar = c.w_parallel = c.w_arrow = 0;
        c.w_point_label = c.w_line_label = c.w_degree = c.w_len = 0;
        c.w_area = c.w_angle_label = 0;
        return c;
    }();
    for (std::uint64_t seed = 100; seed < 108; ++seed) {
        GrayImage img;
        GroundTruthScene gt = sample_scene(sc, seed, &img);
        GroundTruthScene got = extract_scene(img, cfg);
        CHECK(got.prims.lines.size() == gt.prims.lines.size());
        CHECK(got.prims.circles.size() == gt.prims.circles.size());
        for (const auto& gl : gt.prims.lines) {
            double best = 1e30;
            for (const auto& pl : got.prims.lines) {
                LinePos a = gl.as_line(), b = pl.as_line();
                double straight = std::max(std::hypot(a.x1 - b.x1, a.y1 - b.y1),
                                           std::hypot(a.x2 - b.x2, a.y2 - b.y2));
                double crossed = std::max(std::hypot(a.x1 - b.x2, a.y1 - b.y2),
                                          std::hypot(a.x2 - b.x1, a.y2 - b.y1));
                best = std::min({best, straight, crossed});
            }
            CHECK(best <= 4.0);
        }
    }
}
