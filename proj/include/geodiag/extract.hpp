#pragma once

// Classical primitive extraction: binarize, thin, fit circles and segments,
// derive points analytically, template-match the residual ink.

#include <cstdint>
#include <utility>
#include <vector>

#include "geodiag/geom.hpp"
#include "geodiag/png_io.hpp"
#include "geodiag/scene.hpp"

namespace geodiag {

struct BinaryMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0/1, row-major

    BinaryMap() = default;
    BinaryMap(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    bool inside(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    bool get(int x, int y) const { return inside(x, y) && at(x, y) != 0; }
    std::size_t count() const;

    bool operator==(const BinaryMap&) const = default;
};

struct ExtractionConfig {
    int binarize_threshold = 128;
    int circle_iters = 500;        // hypotheses per detection round
    double inlier_tol = 1.5;       // px, distance to the fitted ring
    double min_arc_coverage_deg = 60.0;
    double split_tol = 1.5;        // px, path deviation that breaks a run
    double min_seg_length = 8.0;   // px, applied after collinear merging
    double merge_angle_deg = 2.0;
    double merge_gap = 12.0;       // px, longitudinal gap closed by merging
    double mean_shift_bandwidth = 5.0;
    double small_ink_diag = 24.0;  // bbox diagonal separating glyph ink from strokes
    double point_merge_dist = 3.0;
    double stroke_width = 2.0;     // assumed pen width when rebuilding ink masks
    double dot_radius = 2.0;       // assumed radius of drawn point markers
    std::uint64_t rng_seed = 1;    // circle-hypothesis sampling
};

BinaryMap binarize(const GrayImage& img, int threshold);

// Iterative two-pass thinning down to an 8-connected, 1 px wide skeleton.
BinaryMap skeletonize(const BinaryMap& bin);

// Fitted primitives carry raw coordinates; ids are assigned by extract_scene.
struct FittedCircle {
    CirclePos pos;
    bool arc = false;
    Vec2 arc_e0{}, arc_e1{};  // drawn arc runs ccw from e0 to e1
    int support = 0;          // skeleton pixels on the ring
};

struct FittedSegment {
    LinePos pos;
    LineStyle style = LineStyle::Solid;
    std::vector<Vec2> pixels;  // supporting skeleton pixel centres
};

struct CircleDetection {
    std::vector<FittedCircle> circles;
    BinaryMap residue;  // skeleton with ring pixels removed
};

CircleDetection detect_circles(const BinaryMap& skel, const ExtractionConfig& cfg);

// Path-traced maximal segments. Detected circles mark removal zones whose
// gaps may be bridged when merging collinear runs.
std::vector<FittedSegment> detect_segments(const BinaryMap& skel_minus_circles,
                                           const ExtractionConfig& cfg,
                                           const std::vector<FittedCircle>& removed = {});

struct DerivedPoint {
    Vec2 xy{};
    PointKind kind = PointKind::Independent;
    std::vector<int> on_lines;        // segment indices the point lies on
    std::vector<int> endpoint_of;     // encoded 2*seg + end (0 = a, 1 = b)
    std::vector<int> on_circles;      // circle indices (intersections, tangencies)
    std::vector<int> center_of;       // circle indices
    std::vector<int> arc_end_of;      // encoded 2*circle + end (0 = e0, 1 = e1)
};

// Analytic point derivation from fitted primitives. dots are centroids of
// small round ink blobs: a dot near a fitted centre names that centre, any
// other dot stands alone as an independent point.
std::vector<DerivedPoint> detect_points(const std::vector<FittedSegment>& lines,
                                        const std::vector<FittedCircle>& circles,
                                        const ExtractionConfig& cfg,
                                        const std::vector<Vec2>& dots = {});

// Residual-ink classification against the glyph atlas and bitmap font.
// geo_ink marks pixels explained by fitted geometry; components left over
// are grouped (boxes within 4 px merge) and classified.
std::vector<NonGeoPrimitive> detect_nongeo(const GrayImage& img, const BinaryMap& bin,
                                           const BinaryMap& geo_ink,
                                           const ExtractionConfig& cfg);

// Flat-kernel mean shift. Returns one cluster label per sample; labels are
// indices into the discovered modes, ordered lexicographically.
std::vector<int> mean_shift(const std::vector<std::vector<double>>& samples, double bandwidth);

// Geo scene assembly shared by the extractor and the synthesizer: reading
// order ids per class, endpoint / centre / arc slots wired, points_on
// filled, analytic ink masks attached.
GroundTruthScene assemble_geo(const std::vector<FittedSegment>& lines,
                              const std::vector<FittedCircle>& circles,
                              const std::vector<DerivedPoint>& points, int width, int height,
                              const ExtractionConfig& cfg = {});

// Full image -> PrimitiveSet pipeline (no relations). The returned scene has
// ids assigned, endpoint/centre/arc slots wired and analytic ink masks.
GroundTruthScene extract_scene(const GrayImage& img, const ExtractionConfig& cfg = {});

}  // namespace geodiag
