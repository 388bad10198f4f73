#pragma once

// Scene rendering: strokes for geometry, glyph bitmaps for marks, bitmap
// font for texts. Per-instance ink masks are recorded for geo primitives.

#include "geodiag/png_io.hpp"
#include "geodiag/scene.hpp"

namespace geodiag {

struct RasterConfig {
    double stroke_width = 2.0;  // px
    double dash_on = 6.0;
    double dash_off = 4.0;
    double dot_radius = 2.0;  // center-point dots
    bool blur = false;
    double blur_sigma = 1.0;

    bool operator==(const RasterConfig&) const = default;
};

// Renders the scene and stores each geo primitive's ink pixels as its mask
// (dots belong to their center point; marks and texts carry no mask).
// Arrow-head orientation comes from the symbol's render_rot hint, which is
// a synthesis-time detail and not part of the annotation format.
GrayImage rasterize(GroundTruthScene& scene, const RasterConfig& cfg = {});

// Render without touching the scene.
GrayImage render_image(const GroundTruthScene& scene, const RasterConfig& cfg = {});

GrayImage gaussian_blur(const GrayImage& img, double sigma);

// Analytic ink masks for single primitives, matching what rasterize paints.
// span_from/span are radians; span >= 2*pi means the full circle.
RleMask segment_mask(int w, int h, const LinePos& l, double stroke_width,
                     LineStyle style = LineStyle::Solid, const RasterConfig& cfg = {});
RleMask circle_mask(int w, int h, const CirclePos& c, double stroke_width,
                    double span_from = 0.0, double span = 7.0);
RleMask disk_mask(int w, int h, const Vec2& center, double r);

}  // namespace geodiag
