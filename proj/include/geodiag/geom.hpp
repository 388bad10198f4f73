#pragma once

// Core domain types for plane geometry diagrams: primitives, parsing
// positions, relations and the prior-knowledge table that says which
// primitive classes may relate at all.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace geodiag {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double dist(const Vec2& o) const { return std::hypot(x - o.x, y - o.y); }

    Vec2 normalized() const {
        double n = norm();
        if (n <= 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return {x / n, y / n};
    }
    Vec2 perp() const { return {-y, x}; }
};

// ---------------------------------------------------------------------------
// Parsing positions (the compact analytic representation of a primitive).

struct PointPos {
    double x = 0, y = 0;
    Vec2 xy() const { return {x, y}; }
};

struct LinePos {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    Vec2 a() const { return {x1, y1}; }
    Vec2 b() const { return {x2, y2}; }
    double length() const { return a().dist(b()); }
    Vec2 midpoint() const { return {(x1 + x2) / 2.0, (y1 + y2) / 2.0}; }
    Vec2 dir() const { return (b() - a()).normalized(); }
};

struct CirclePos {
    double x = 0, y = 0, r = 0;
    Vec2 center() const { return {x, y}; }
};

struct BoxPos {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    Vec2 center() const { return {(x1 + x2) / 2.0, (y1 + y2) / 2.0}; }
    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
};

using ParsingPosition = std::variant<PointPos, LinePos, CirclePos, BoxPos>;

// Throws std::invalid_argument when a position violates its invariant
// (degenerate segment, non-positive radius, inverted box).
void validate_position(const ParsingPosition& pos);

// ---------------------------------------------------------------------------
// Instance masks, run-length encoded over row-major pixel order.
// counts alternate runs of background and ink, starting with background.

struct RleMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> counts;

    static RleMask encode(int width, int height, const std::vector<std::uint8_t>& pixels);
    std::vector<std::uint8_t> decode() const;
    std::size_t area() const;  // number of set pixels

    bool operator==(const RleMask& o) const = default;
};

// ---------------------------------------------------------------------------
// Primitive classes.

enum class GeoClass { Point, Line, Circle };
enum class LineStyle { Solid, Dash, Mixed };
enum class CircleStyle { Complete, Arc };
enum class PointKind { Intersection, Tangent, Endpoint, Independent, Center };

enum class SymbolClass {
    Perpendicular,
    Head,
    HeadLen,
    Angle,
    DoubleAngle,
    TripleAngle,
    QuadAngle,
    PentaAngle,
    Bar,
    DoubleBar,
    TripleBar,
    QuadBar,
    Parallel,
    DoubleParallel,
    TripleParallel,
    Text,
    Unknown,
};

enum class TextClass { Point, Line, Angle, Len, Degree, Area, Unknown };

const char* to_string(GeoClass c);
const char* to_string(LineStyle s);
const char* to_string(PointKind k);
const char* to_string(SymbolClass c);
const char* to_string(TextClass c);
LineStyle line_style_from_string(const std::string& s);
PointKind point_kind_from_string(const std::string& s);
SymbolClass symbol_class_from_string(const std::string& s);
TextClass text_class_from_string(const std::string& s);

// Symbol super-class buckets used for equality grouping.
bool is_angle_mark(SymbolClass c);
bool is_bar_mark(SymbolClass c);
bool is_parallel_mark(SymbolClass c);
bool is_head(SymbolClass c);

struct GeoPrimitive {
    std::string id;
    GeoClass cls = GeoClass::Point;
    ParsingPosition pos;
    std::optional<RleMask> mask;

    // line fields
    LineStyle line_style = LineStyle::Solid;
    std::array<std::string, 2> endpoints;  // point ids, lines only
    // circle fields
    CircleStyle circle_style = CircleStyle::Complete;
    std::string center_point;                   // point id of the center
    std::array<std::string, 2> arc_endpoints;   // ordered: drawn arc runs ccw from [0] to [1]
    // shared
    std::vector<std::string> points_on;  // on-line / on-circle point ids
    PointKind point_kind = PointKind::Independent;

    const PointPos& as_point() const { return std::get<PointPos>(pos); }
    const LinePos& as_line() const { return std::get<LinePos>(pos); }
    const CirclePos& as_circle() const { return std::get<CirclePos>(pos); }
};

struct NonGeoPrimitive {
    enum class Kind { Symbol, Text };

    std::string id;
    Kind kind = Kind::Symbol;
    BoxPos box;
    SymbolClass symbol_class = SymbolClass::Unknown;
    TextClass text_class = TextClass::Unknown;
    std::string content;  // texts only
    int render_rot = 0;   // arrow-head orientation hint for rendering, not serialized
};

// ---------------------------------------------------------------------------
// Relations: one subject (point, symbol or text), ordered objects.

enum class RelType {
    PointOnLine,
    PointOnCircle,
    CenterOfCircle,
    Text2Point,
    Text2Line,
    Text2Angle,
    Text2Degree,
    Text2Len,
    Text2Area,
    Perpendicular,
    AngleEquality,
    BarEquality,
    ParallelEquality,
    ArrowIndication,
};

const char* to_string(RelType t);
RelType rel_type_from_string(const std::string& s);

enum class RelGroup { Geo2Geo, Text2Geo, Sym2Geo, Text2Head };
RelGroup rel_group(RelType t);

struct Relation {
    std::string subject;
    std::vector<std::string> objects;
    RelType type = RelType::PointOnLine;

    bool operator==(const Relation& o) const = default;
    // Sort key for deterministic relation-set ordering.
    std::string key() const;
};

// ---------------------------------------------------------------------------
// Primitive sets.

struct PrimitiveSet {
    std::vector<GeoPrimitive> points;
    std::vector<GeoPrimitive> lines;
    std::vector<GeoPrimitive> circles;
    std::vector<NonGeoPrimitive> symbols;
    std::vector<NonGeoPrimitive> texts;

    const GeoPrimitive* find_geo(const std::string& id) const;
    const NonGeoPrimitive* find_nongeo(const std::string& id) const;
    GeoPrimitive* find_geo(const std::string& id);
    NonGeoPrimitive* find_nongeo(const std::string& id);
    Vec2 point_xy(const std::string& point_id) const;  // throws if missing
    std::size_t total() const;
};

// ---------------------------------------------------------------------------
// Prior knowledge K: which primitive kinds may relate, how a relation must
// be shaped, and whether its geometry actually admits it.

enum class PrimKind { Point, Line, Circle, Symbol, Text };

PrimKind kind_of_id(const std::string& id);  // by prefix letter, throws on unknown

// Admissible relation types for a (subject kind, object kind) pair.
// Pairs outside the schema return an empty list.
std::vector<RelType> admissible_rel_types(PrimKind subject, PrimKind object);

// Structural check: subject/object kinds and arities match the relation type,
// including symbol sub-class constraints. Returns false with a reason.
bool relation_shape_ok(const Relation& rel, const PrimitiveSet& prims, std::string* reason = nullptr);

struct AdmissibilityTol {
    double on_line = 3.0;
    double on_circle = 3.0;
    double symbol_radius = 25.0;
    double text_radius = 30.0;
    double perp_angle_deg = 5.0;
    double union_gap = 20.0;
};

// Geometric admissibility of a structurally valid relation.
bool relation_geometry_ok(const Relation& rel, const PrimitiveSet& prims,
                          const AdmissibilityTol& tol, std::string* reason = nullptr);

// ---------------------------------------------------------------------------
// Exact geometric predicates.

// Euclidean distance from p to the closed segment. Throws on a degenerate
// segment (coincident endpoints).
double dist_point_line(const Vec2& p, const LinePos& l);

// | |p - center| - r |
double dist_point_circle(const Vec2& p, const CirclePos& c);

// True iff q lies within tol of the infinite ray from vertex through arm
// with non-negative projection parameter. A vertex never lies on its own arm.
bool point_on_ray(const Vec2& vertex, const Vec2& arm, const Vec2& q, double tol);

// Intersection of the infinite supporting lines; empty when parallel.
std::optional<Vec2> line_line_intersection(const LinePos& a, const LinePos& b);

// Intersections of the infinite supporting line with the circle (0, 1 or 2).
std::vector<Vec2> line_circle_intersections(const LinePos& l, const CirclePos& c);

// Angle between segment directions in degrees, folded into [0, 90].
double segment_angle_deg(const LinePos& a, const LinePos& b);

// Distance between two axis-aligned boxes (0 when they touch or overlap).
double box_gap(const BoxPos& a, const BoxPos& b);
double box_iou(const BoxPos& a, const BoxPos& b);

// ---------------------------------------------------------------------------
// Canonical naming.

struct NamedPoint {
    std::string id;
    Vec2 xy;
};

// The two points with extreme projection parameters along the direction of
// their common line, returned in lexicographic id order. Needs >= 2 points.
std::pair<std::string, std::string> canonical_line_points(const std::vector<NamedPoint>& pts);

// Canonical angle triple (a, vertex, b): a and b are the candidates farthest
// from the vertex on each ray, arms ordered so the triple string compares
// lexicographically smallest. Candidate lists must be non-empty.
std::array<std::string, 3> canonical_angle(const std::string& vertex_id, const Vec2& vertex,
                                           const std::vector<NamedPoint>& arm1,
                                           const std::vector<NamedPoint>& arm2);

}  // namespace geodiag
