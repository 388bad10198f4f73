#include "geodiag/raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "geodiag/glyphs.hpp"

namespace geodiag {

namespace {

// Pixel (x, y) covers the unit square [x, x+1) x [y, y+1); geometry is sampled
// at its centre (x+0.5, y+0.5) so stroke widths come out true to the analytic shape.
struct Painter {
    GrayImage& img;
    std::vector<std::uint8_t>* mask = nullptr;  // current instance, may be null
    int bx0 = 0, by0 = 0, bx1 = -1, by1 = -1;   // inked bbox since reset_bbox

    void reset_bbox() {
        bx0 = img.width;
        by0 = img.height;
        bx1 = by1 = -1;
    }

    void ink(int x, int y) {
        if (!img.inside(x, y)) return;
        img.at(x, y) = 0;
        bx0 = std::min(bx0, x);
        by0 = std::min(by0, y);
        bx1 = std::max(bx1, x);
        by1 = std::max(by1, y);
        if (mask) (*mask)[static_cast<std::size_t>(y) * img.width + x] = 1;
    }
};

Vec2 px_center(int x, int y) {
    return {x + 0.5, y + 0.5};
}

double ccw_offset(double from, double to) {
    double s = to - from;
    while (s < 0) s += 2 * M_PI;
    while (s >= 2 * M_PI) s -= 2 * M_PI;
    return s;
}

void paint_segment(Painter& p, const LinePos& l, LineStyle style, const RasterConfig& cfg) {
    Vec2 a = l.a(), b = l.b();
    Vec2 d = b - a;
    double len = d.norm();
    if (len <= 0) return;
    Vec2 u = d * (1.0 / len);
    double hw = cfg.stroke_width / 2.0;
    double period = cfg.dash_on + cfg.dash_off;

    int x0 = static_cast<int>(std::floor(std::min(a.x, b.x) - hw - 1));
    int x1 = static_cast<int>(std::ceil(std::max(a.x, b.x) + hw + 1));
    int y0 = static_cast<int>(std::floor(std::min(a.y, b.y) - hw - 1));
    int y1 = static_cast<int>(std::ceil(std::max(a.y, b.y) + hw + 1));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            Vec2 q = px_center(x, y);
            double t = std::clamp((q - a).dot(u), 0.0, len);
            if (q.dist(a + u * t) > hw) continue;
            bool on = true;
            if (style == LineStyle::Dash) {
                on = std::fmod(t, period) < cfg.dash_on;
            } else if (style == LineStyle::Mixed) {
                on = t < len / 2.0 || std::fmod(t - len / 2.0, period) < cfg.dash_on;
            }
            if (on) p.ink(x, y);
        }
}

void paint_ring(Painter& p, const CirclePos& c, double hw, double a0, double span) {
    bool arc = span < 2 * M_PI - 1e-9;
    int x0 = static_cast<int>(std::floor(c.x - c.r - hw - 1));
    int x1 = static_cast<int>(std::ceil(c.x + c.r + hw + 1));
    int y0 = static_cast<int>(std::floor(c.y - c.r - hw - 1));
    int y1 = static_cast<int>(std::ceil(c.y + c.r + hw + 1));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            Vec2 q = px_center(x, y);
            if (std::abs(q.dist(c.center()) - c.r) > hw) continue;
            if (arc) {
                double ang = std::atan2(q.y - c.y, q.x - c.x);
                if (ccw_offset(a0, ang) > span) continue;
            }
            p.ink(x, y);
        }
}

// arc span (start angle, ccw extent) for a circle primitive; full turn otherwise
std::pair<double, double> arc_span(const GeoPrimitive& prim, const PrimitiveSet& prims) {
    const CirclePos& c = prim.as_circle();
    if (prim.circle_style == CircleStyle::Arc && !prim.arc_endpoints[0].empty() &&
        !prim.arc_endpoints[1].empty()) {
        Vec2 e0 = prims.point_xy(prim.arc_endpoints[0]);
        Vec2 e1 = prims.point_xy(prim.arc_endpoints[1]);
        double a0 = std::atan2(e0.y - c.y, e0.x - c.x);
        return {a0, ccw_offset(a0, std::atan2(e1.y - c.y, e1.x - c.x))};
    }
    return {0.0, 2 * M_PI};
}

void paint_disk(Painter& p, const Vec2& ctr, double r) {
    for (int y = static_cast<int>(std::floor(ctr.y - r - 1)); y <= ctr.y + r + 1; ++y)
        for (int x = static_cast<int>(std::floor(ctr.x - r - 1)); x <= ctr.x + r + 1; ++x)
            if (px_center(x, y).dist(ctr) <= r) p.ink(x, y);
}

void paint_glyph(Painter& p, const GlyphBitmap& g, const BoxPos& box) {
    int ox = static_cast<int>(std::lround(box.x1));
    int oy = static_cast<int>(std::lround(box.y1));
    for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x)
            if (g.at(x, y)) p.ink(ox + x, oy + y);
}

void paint_text(Painter& p, const std::string& content, const BoxPos& box) {
    int ox = static_cast<int>(std::lround(box.x1));
    int oy = static_cast<int>(std::lround(box.y1));
    auto chars = font_split(content);
    for (std::size_t i = 0; i < chars.size(); ++i) {
        auto cols = font_columns(chars[i]);
        for (int cx = 0; cx < kFontW; ++cx)
            for (int cy = 0; cy < kFontH; ++cy)
                if (cols[cx] & (1u << cy)) p.ink(ox + static_cast<int>(i) * kFontPitch + cx, oy + cy);
    }
}

}  // namespace

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (sigma <= 0) return img;
    int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (auto& k : kernel) k /= sum;

    std::vector<double> tmp(img.pixels.size());
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                int xi = std::clamp(x + i, 0, img.width - 1);
                acc += kernel[i + radius] * img.at(xi, y);
            }
            tmp[static_cast<std::size_t>(y) * img.width + x] = acc;
        }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                int yi = std::clamp(y + i, 0, img.height - 1);
                acc += kernel[i + radius] * tmp[static_cast<std::size_t>(yi) * img.width + x];
            }
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(acc, 0.0, 255.0)));
        }
    return out;
}

void check_in_bounds(const GroundTruthScene& scene, const RasterConfig& cfg) {
    double w = scene.width, h = scene.height;
    double hw = cfg.stroke_width / 2.0;
    auto fail = [](const std::string& id) {
        throw std::invalid_argument("rasterize: primitive " + id + " out of image bounds");
    };
    auto in = [&](double x, double y) { return x >= 0 && y >= 0 && x <= w && y <= h; };
    for (const auto& l : scene.prims.lines) {
        const auto& s = l.as_line();
        if (!in(s.x1 - hw, s.y1 - hw) || !in(s.x1 + hw, s.y1 + hw) || !in(s.x2 - hw, s.y2 - hw) ||
            !in(s.x2 + hw, s.y2 + hw))
            fail(l.id);
    }
    for (const auto& c : scene.prims.circles) {
        const auto& cc = c.as_circle();
        double ext = cc.r + hw;
        if (!in(cc.x - ext, cc.y - ext) || !in(cc.x + ext, cc.y + ext)) fail(c.id);
    }
    for (const auto& pt : scene.prims.points) {
        const Vec2 q = pt.as_point().xy();
        bool dotted =
            pt.point_kind == PointKind::Center || pt.point_kind == PointKind::Independent;
        double ext = dotted ? cfg.dot_radius : 0.0;
        if (!in(q.x - ext, q.y - ext) || !in(q.x + ext, q.y + ext)) fail(pt.id);
    }
    for (const auto& s : scene.prims.symbols)
        if (!in(s.box.x1, s.box.y1) || !in(s.box.x2, s.box.y2)) fail(s.id);
    for (const auto& t : scene.prims.texts)
        if (!in(t.box.x1, t.box.y1) || !in(t.box.x2, t.box.y2)) fail(t.id);
}

GrayImage rasterize(GroundTruthScene& scene, const RasterConfig& cfg) {
    check_in_bounds(scene, cfg);
    GrayImage img(scene.width, scene.height, 255);
    std::vector<std::uint8_t> mask_buf(img.pixels.size());
    Painter p{img, nullptr};

    auto with_mask = [&](GeoPrimitive& g, auto&& fn) {
        std::fill(mask_buf.begin(), mask_buf.end(), 0);
        p.mask = &mask_buf;
        fn();
        p.mask = nullptr;
        g.mask = RleMask::encode(img.width, img.height, mask_buf);
    };

    for (auto& l : scene.prims.lines)
        with_mask(l, [&] { paint_segment(p, l.as_line(), l.line_style, cfg); });
    for (auto& c : scene.prims.circles)
        with_mask(c, [&] {
            auto [a0, span] = arc_span(c, scene.prims);
            paint_ring(p, c.as_circle(), cfg.stroke_width / 2.0, a0, span);
        });
    // Centres and free-standing points get a visible dot; points implied by
    // incidences (crossings, endpoints, tangencies) carry no ink of their own.
    for (auto& pt : scene.prims.points) {
        if (pt.point_kind != PointKind::Center && pt.point_kind != PointKind::Independent)
            continue;
        with_mask(pt, [&] { paint_disk(p, pt.as_point().xy(), cfg.dot_radius); });
    }

    // Boxes are snapped to the exact ink of the painted glyph so annotation
    // boxes and detector boxes agree on clean renders.
    for (auto& s : scene.prims.symbols) {
        if (s.symbol_class == SymbolClass::Unknown || s.symbol_class == SymbolClass::Text) continue;
        p.reset_bbox();
        paint_glyph(p, glyph_for(s.symbol_class, s.render_rot), s.box);
        if (p.bx1 >= p.bx0)
            s.box = {static_cast<double>(p.bx0), static_cast<double>(p.by0),
                     static_cast<double>(p.bx1 + 1), static_cast<double>(p.by1 + 1)};
    }
    for (auto& t : scene.prims.texts) {
        p.reset_bbox();
        paint_text(p, t.content, t.box);
        if (p.bx1 >= p.bx0)
            t.box = {static_cast<double>(p.bx0), static_cast<double>(p.by0),
                     static_cast<double>(p.bx1 + 1), static_cast<double>(p.by1 + 1)};
    }

    if (cfg.blur) img = gaussian_blur(img, cfg.blur_sigma);
    return img;
}

GrayImage render_image(const GroundTruthScene& scene, const RasterConfig& cfg) {
    GroundTruthScene copy = scene;
    return rasterize(copy, cfg);
}

namespace {

template <typename Fn>
RleMask capture_mask(int w, int h, Fn&& paint) {
    GrayImage scratch(w, h, 255);
    std::vector<std::uint8_t> buf(scratch.pixels.size());
    Painter p{scratch, &buf};
    paint(p);
    return RleMask::encode(w, h, buf);
}

}  // namespace

RleMask segment_mask(int w, int h, const LinePos& l, double stroke_width, LineStyle style,
                     const RasterConfig& cfg) {
    RasterConfig c = cfg;
    c.stroke_width = stroke_width;
    return capture_mask(w, h, [&](Painter& p) { paint_segment(p, l, style, c); });
}

RleMask circle_mask(int w, int h, const CirclePos& c, double stroke_width, double span_from,
                    double span) {
    return capture_mask(
        w, h, [&](Painter& p) { paint_ring(p, c, stroke_width / 2.0, span_from, span); });
}

RleMask disk_mask(int w, int h, const Vec2& center, double r) {
    return capture_mask(w, h, [&](Painter& p) { paint_disk(p, center, r); });
}

}  // namespace geodiag
