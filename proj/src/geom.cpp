#include "geodiag/geom.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <sstream>

namespace geodiag {

void validate_position(const ParsingPosition& pos) {
    if (std::holds_alternative<PointPos>(pos)) {
        return;
    }
    if (const auto* l = std::get_if<LinePos>(&pos)) {
        if (l->length() <= 0.0) throw std::invalid_argument("degenerate line: coincident endpoints");
        return;
    }
    if (const auto* c = std::get_if<CirclePos>(&pos)) {
        if (!(c->r > 0.0)) throw std::invalid_argument("circle radius must be positive");
        return;
    }
    const auto& b = std::get<BoxPos>(pos);
    if (!(b.x2 > b.x1) || !(b.y2 > b.y1)) throw std::invalid_argument("box must have positive extent");
}

// ---------------------------------------------------------------------------

RleMask RleMask::encode(int width, int height, const std::vector<std::uint8_t>& pixels) {
    if (width < 0 || height < 0 || pixels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("mask pixel buffer does not match dimensions");
    RleMask m;
    m.width = width;
    m.height = height;
    std::uint8_t cur = 0;  // runs start with background
    std::uint32_t run = 0;
    for (std::uint8_t px : pixels) {
        std::uint8_t v = px ? 1 : 0;
        if (v == cur) {
            ++run;
        } else {
            m.counts.push_back(run);
            cur = v;
            run = 1;
        }
    }
    m.counts.push_back(run);
    return m;
}

std::vector<std::uint8_t> RleMask::decode() const {
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(width) * height);
    std::uint8_t cur = 0;
    for (std::uint32_t run : counts) {
        out.insert(out.end(), run, cur);
        cur = cur ? 0 : 1;
    }
    if (out.size() != static_cast<std::size_t>(width) * height)
        throw std::runtime_error("rle counts do not cover width*height pixels");
    return out;
}

std::size_t RleMask::area() const {
    std::size_t a = 0;
    for (std::size_t i = 1; i < counts.size(); i += 2) a += counts[i];
    return a;
}

// ---------------------------------------------------------------------------
// Enum <-> string tables.

const char* to_string(GeoClass c) {
    switch (c) {
        case GeoClass::Point: return "point";
        case GeoClass::Line: return "line";
        case GeoClass::Circle: return "circle";
    }
    return "?";
}

const char* to_string(LineStyle s) {
    switch (s) {
        case LineStyle::Solid: return "solid";
        case LineStyle::Dash: return "dash";
        case LineStyle::Mixed: return "mixed";
    }
    return "?";
}

const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::Intersection: return "intersection";
        case PointKind::Tangent: return "tangent";
        case PointKind::Endpoint: return "endpoint";
        case PointKind::Independent: return "independent";
        case PointKind::Center: return "center";
    }
    return "?";
}

const char* to_string(SymbolClass c) {
    switch (c) {
        case SymbolClass::Perpendicular: return "perpendicular";
        case SymbolClass::Head: return "head";
        case SymbolClass::HeadLen: return "head_len";
        case SymbolClass::Angle: return "angle";
        case SymbolClass::DoubleAngle: return "double angle";
        case SymbolClass::TripleAngle: return "triple angle";
        case SymbolClass::QuadAngle: return "quad angle";
        case SymbolClass::PentaAngle: return "penta angle";
        case SymbolClass::Bar: return "bar";
        case SymbolClass::DoubleBar: return "double bar";
        case SymbolClass::TripleBar: return "triple bar";
        case SymbolClass::QuadBar: return "quad bar";
        case SymbolClass::Parallel: return "parallel";
        case SymbolClass::DoubleParallel: return "double parallel";
        case SymbolClass::TripleParallel: return "triple parallel";
        case SymbolClass::Text: return "text";
        case SymbolClass::Unknown: return "unknown";
    }
    return "?";
}

const char* to_string(TextClass c) {
    switch (c) {
        case TextClass::Point: return "point";
        case TextClass::Line: return "line";
        case TextClass::Angle: return "angle";
        case TextClass::Len: return "len";
        case TextClass::Degree: return "degree";
        case TextClass::Area: return "area";
        case TextClass::Unknown: return "unknown";
    }
    return "?";
}

namespace {

template <typename E>
E from_table(const std::string& s, std::initializer_list<E> values, const char* what) {
    for (E v : values)
        if (s == to_string(v)) return v;
    throw std::invalid_argument(std::string("unknown ") + what + ": '" + s + "'");
}

}  // namespace

LineStyle line_style_from_string(const std::string& s) {
    return from_table(s, {LineStyle::Solid, LineStyle::Dash, LineStyle::Mixed}, "line style");
}

PointKind point_kind_from_string(const std::string& s) {
    return from_table(s,
                      {PointKind::Intersection, PointKind::Tangent, PointKind::Endpoint,
                       PointKind::Independent, PointKind::Center},
                      "point kind");
}

SymbolClass symbol_class_from_string(const std::string& s) {
    return from_table(s,
                      {SymbolClass::Perpendicular, SymbolClass::Head, SymbolClass::HeadLen,
                       SymbolClass::Angle, SymbolClass::DoubleAngle, SymbolClass::TripleAngle,
                       SymbolClass::QuadAngle, SymbolClass::PentaAngle, SymbolClass::Bar,
                       SymbolClass::DoubleBar, SymbolClass::TripleBar, SymbolClass::QuadBar,
                       SymbolClass::Parallel, SymbolClass::DoubleParallel, SymbolClass::TripleParallel,
                       SymbolClass::Text, SymbolClass::Unknown},
                      "symbol class");
}

TextClass text_class_from_string(const std::string& s) {
    return from_table(s,
                      {TextClass::Point, TextClass::Line, TextClass::Angle, TextClass::Len,
                       TextClass::Degree, TextClass::Area, TextClass::Unknown},
                      "text class");
}

bool is_angle_mark(SymbolClass c) {
    return c == SymbolClass::Angle || c == SymbolClass::DoubleAngle || c == SymbolClass::TripleAngle ||
           c == SymbolClass::QuadAngle || c == SymbolClass::PentaAngle;
}

bool is_bar_mark(SymbolClass c) {
    return c == SymbolClass::Bar || c == SymbolClass::DoubleBar || c == SymbolClass::TripleBar ||
           c == SymbolClass::QuadBar;
}

bool is_parallel_mark(SymbolClass c) {
    return c == SymbolClass::Parallel || c == SymbolClass::DoubleParallel ||
           c == SymbolClass::TripleParallel;
}

bool is_head(SymbolClass c) { return c == SymbolClass::Head || c == SymbolClass::HeadLen; }

const char* to_string(RelType t) {
    switch (t) {
        case RelType::PointOnLine: return "PointOnLine";
        case RelType::PointOnCircle: return "PointOnCircle";
        case RelType::CenterOfCircle: return "CenterOfCircle";
        case RelType::Text2Point: return "Text2Point";
        case RelType::Text2Line: return "Text2Line";
        case RelType::Text2Angle: return "Text2Angle";
        case RelType::Text2Degree: return "Text2Degree";
        case RelType::Text2Len: return "Text2Len";
        case RelType::Text2Area: return "Text2Area";
        case RelType::Perpendicular: return "Perpendicular";
        case RelType::AngleEquality: return "AngleEquality";
        case RelType::BarEquality: return "BarEquality";
        case RelType::ParallelEquality: return "ParallelEquality";
        case RelType::ArrowIndication: return "ArrowIndication";
    }
    return "?";
}

RelType rel_type_from_string(const std::string& s) {
    return from_table(s,
                      {RelType::PointOnLine, RelType::PointOnCircle, RelType::CenterOfCircle,
                       RelType::Text2Point, RelType::Text2Line, RelType::Text2Angle,
                       RelType::Text2Degree, RelType::Text2Len, RelType::Text2Area,
                       RelType::Perpendicular, RelType::AngleEquality, RelType::BarEquality,
                       RelType::ParallelEquality, RelType::ArrowIndication},
                      "relation type");
}

RelGroup rel_group(RelType t) {
    switch (t) {
        case RelType::PointOnLine:
        case RelType::PointOnCircle:
        case RelType::CenterOfCircle:
            return RelGroup::Geo2Geo;
        case RelType::Text2Point:
        case RelType::Text2Line:
        case RelType::Text2Angle:
        case RelType::Text2Degree:
        case RelType::Text2Len:
        case RelType::Text2Area:
            return RelGroup::Text2Geo;
        case RelType::Perpendicular:
        case RelType::AngleEquality:
        case RelType::BarEquality:
        case RelType::ParallelEquality:
            return RelGroup::Sym2Geo;
        case RelType::ArrowIndication:
            return RelGroup::Text2Head;
    }
    return RelGroup::Geo2Geo;
}

std::string Relation::key() const {
    std::string k = to_string(type);
    k += '|';
    k += subject;
    for (const auto& o : objects) {
        k += '|';
        k += o;
    }
    return k;
}

// ---------------------------------------------------------------------------

const GeoPrimitive* PrimitiveSet::find_geo(const std::string& id) const {
    for (const auto* vec : {&points, &lines, &circles})
        for (const auto& g : *vec)
            if (g.id == id) return &g;
    return nullptr;
}

GeoPrimitive* PrimitiveSet::find_geo(const std::string& id) {
    return const_cast<GeoPrimitive*>(static_cast<const PrimitiveSet*>(this)->find_geo(id));
}

const NonGeoPrimitive* PrimitiveSet::find_nongeo(const std::string& id) const {
    for (const auto* vec : {&symbols, &texts})
        for (const auto& n : *vec)
            if (n.id == id) return &n;
    return nullptr;
}

NonGeoPrimitive* PrimitiveSet::find_nongeo(const std::string& id) {
    return const_cast<NonGeoPrimitive*>(static_cast<const PrimitiveSet*>(this)->find_nongeo(id));
}

Vec2 PrimitiveSet::point_xy(const std::string& point_id) const {
    const GeoPrimitive* g = find_geo(point_id);
    if (!g || g->cls != GeoClass::Point)
        throw std::invalid_argument("no such point: '" + point_id + "'");
    return g->as_point().xy();
}

std::size_t PrimitiveSet::total() const {
    return points.size() + lines.size() + circles.size() + symbols.size() + texts.size();
}

// ---------------------------------------------------------------------------
// Prior knowledge.

PrimKind kind_of_id(const std::string& id) {
    if (id.empty()) throw std::invalid_argument("empty primitive id");
    switch (id[0]) {
        case 'P': return PrimKind::Point;
        case 'L': return PrimKind::Line;
        case 'C': return PrimKind::Circle;
        case 'S': return PrimKind::Symbol;
        case 'T': return PrimKind::Text;
    }
    throw std::invalid_argument("id prefix does not name a primitive kind: '" + id + "'");
}

std::vector<RelType> admissible_rel_types(PrimKind subject, PrimKind object) {
    using K = PrimKind;
    using R = RelType;
    if (subject == K::Point && object == K::Line) return {R::PointOnLine};
    if (subject == K::Point && object == K::Circle) return {R::PointOnCircle, R::CenterOfCircle};
    if (subject == K::Symbol && object == K::Point) return {R::Perpendicular, R::AngleEquality};
    if (subject == K::Symbol && object == K::Line)
        return {R::Perpendicular, R::BarEquality, R::ParallelEquality};
    if (subject == K::Symbol && object == K::Circle) return {R::BarEquality};
    if (subject == K::Text && object == K::Point) return {R::Text2Point, R::Text2Angle, R::Text2Degree};
    if (subject == K::Text && object == K::Line) return {R::Text2Line, R::Text2Len};
    if (subject == K::Text && object == K::Circle)
        return {R::Text2Degree, R::Text2Len, R::Text2Area};
    if (subject == K::Text && object == K::Symbol) return {R::ArrowIndication};
    return {};
}

namespace {

bool fail(std::string* reason, const std::string& msg) {
    if (reason) *reason = msg;
    return false;
}

bool is_point(const PrimitiveSet& p, const std::string& id) {
    const auto* g = p.find_geo(id);
    return g && g->cls == GeoClass::Point;
}
bool is_line(const PrimitiveSet& p, const std::string& id) {
    const auto* g = p.find_geo(id);
    return g && g->cls == GeoClass::Line;
}
bool is_circle(const PrimitiveSet& p, const std::string& id) {
    const auto* g = p.find_geo(id);
    return g && g->cls == GeoClass::Circle;
}
bool is_arc(const PrimitiveSet& p, const std::string& id) {
    const auto* g = p.find_geo(id);
    return g && g->cls == GeoClass::Circle && g->circle_style == CircleStyle::Arc;
}

}  // namespace

bool relation_shape_ok(const Relation& rel, const PrimitiveSet& prims, std::string* reason) {
    const auto& obj = rel.objects;
    auto all_points = [&](std::size_t from = 0) {
        for (std::size_t i = from; i < obj.size(); ++i)
            if (!is_point(prims, obj[i])) return false;
        return true;
    };

    switch (rel.type) {
        case RelType::PointOnLine:
            if (!is_point(prims, rel.subject)) return fail(reason, "subject must be a point");
            if (obj.size() != 1 || !is_line(prims, obj[0])) return fail(reason, "object must be one line");
            return true;
        case RelType::PointOnCircle:
        case RelType::CenterOfCircle:
            if (!is_point(prims, rel.subject)) return fail(reason, "subject must be a point");
            if (obj.size() != 1 || !is_circle(prims, obj[0]))
                return fail(reason, "object must be one circle");
            return true;
        case RelType::Text2Point: {
            const auto* t = prims.find_nongeo(rel.subject);
            if (!t || t->kind != NonGeoPrimitive::Kind::Text) return fail(reason, "subject must be a text");
            if (obj.size() != 1 || !is_point(prims, obj[0])) return fail(reason, "object must be one point");
            return true;
        }
        case RelType::Text2Line: {
            const auto* t = prims.find_nongeo(rel.subject);
            if (!t || t->kind != NonGeoPrimitive::Kind::Text) return fail(reason, "subject must be a text");
            if (obj.size() != 1 || !is_line(prims, obj[0])) return fail(reason, "object must be one line");
            return true;
        }
        case RelType::Text2Angle: {
            const auto* t = prims.find_nongeo(rel.subject);
            if (!t || t->kind != NonGeoPrimitive::Kind::Text) return fail(reason, "subject must be a text");
            if (obj.size() != 3 || !all_points()) return fail(reason, "objects must be an angle triple");
            return true;
        }
        case RelType::Text2Degree: {
            const auto* t = prims.find_nongeo(rel.subject);
            if (!t || t->kind != NonGeoPrimitive::Kind::Text) return fail(reason, "subject must be a text");
            if (obj.size() == 3 && all_points()) return true;
            if (obj.size() == 1 && is_arc(prims, obj[0])) return true;
            return fail(reason, "objects must be an angle triple or one arc");
        }
        case RelType::Text2Len: {
            const auto* t = prims.find_nongeo(rel.subject);
            if (!t || t->kind != NonGeoPrimitive::Kind::Text) return fail(reason, "subject must be a text");
            if (obj.size() == 1 && (is_line(prims, obj[0]) || is_arc(prims, obj[0]))) return true;
            return fail(reason, "object must be one line or arc");
        }
        case RelType::Text2Area: {
            const auto* t = prims.find_nongeo(rel.subject);
            if (!t || t->kind != NonGeoPrimitive::Kind::Text) return fail(reason, "subject must be a text");
            if (obj.size() == 1 && is_circle(prims, obj[0])) return true;
            return fail(reason, "object must be one circle");
        }
        case RelType::Perpendicular: {
            const auto* s = prims.find_nongeo(rel.subject);
            if (!s || s->kind != NonGeoPrimitive::Kind::Symbol ||
                s->symbol_class != SymbolClass::Perpendicular)
                return fail(reason, "subject must be a perpendicular symbol");
            if (obj.size() != 2 || !is_line(prims, obj[0]) || !is_line(prims, obj[1]) || obj[0] == obj[1])
                return fail(reason, "objects must be two distinct lines");
            return true;
        }
        case RelType::AngleEquality: {
            const auto* s = prims.find_nongeo(rel.subject);
            if (!s || s->kind != NonGeoPrimitive::Kind::Symbol || !is_angle_mark(s->symbol_class))
                return fail(reason, "subject must be an angle mark");
            if (obj.size() < 6 || obj.size() % 3 != 0 || !all_points())
                return fail(reason, "objects must be >= 2 flattened angle triples");
            return true;
        }
        case RelType::BarEquality: {
            const auto* s = prims.find_nongeo(rel.subject);
            if (!s || s->kind != NonGeoPrimitive::Kind::Symbol || !is_bar_mark(s->symbol_class))
                return fail(reason, "subject must be a bar mark");
            if (obj.size() < 2) return fail(reason, "needs >= 2 objects");
            for (const auto& o : obj)
                if (!is_line(prims, o) && !is_arc(prims, o))
                    return fail(reason, "objects must be lines or arcs");
            return true;
        }
        case RelType::ParallelEquality: {
            const auto* s = prims.find_nongeo(rel.subject);
            if (!s || s->kind != NonGeoPrimitive::Kind::Symbol || !is_parallel_mark(s->symbol_class))
                return fail(reason, "subject must be a parallel mark");
            if (obj.size() < 2) return fail(reason, "needs >= 2 objects");
            for (const auto& o : obj)
                if (!is_line(prims, o)) return fail(reason, "objects must be lines");
            return true;
        }
        case RelType::ArrowIndication: {
            const auto* t = prims.find_nongeo(rel.subject);
            if (!t || t->kind != NonGeoPrimitive::Kind::Text) return fail(reason, "subject must be a text");
            const auto* s = obj.size() == 1 ? prims.find_nongeo(obj[0]) : nullptr;
            if (!s || s->kind != NonGeoPrimitive::Kind::Symbol || !is_head(s->symbol_class))
                return fail(reason, "object must be one head symbol");
            return true;
        }
    }
    return fail(reason, "unknown relation type");
}

namespace {

// Nearest distance from a point to any part of a geo primitive's locus.
double dist_to_locus(const Vec2& p, const GeoPrimitive& g) {
    switch (g.cls) {
        case GeoClass::Point: return p.dist(g.as_point().xy());
        case GeoClass::Line: return dist_point_line(p, g.as_line());
        case GeoClass::Circle: return dist_point_circle(p, g.as_circle());
    }
    return 1e300;
}

}  // namespace

bool relation_geometry_ok(const Relation& rel, const PrimitiveSet& prims,
                          const AdmissibilityTol& tol, std::string* reason) {
    if (!relation_shape_ok(rel, prims, reason)) return false;

    auto near_subject = [&](const BoxPos& box, double radius) {
        Vec2 c = box.center();
        for (const auto& o : rel.objects) {
            const auto* g = prims.find_geo(o);
            if (g && dist_to_locus(c, *g) > radius) return false;
        }
        return true;
    };

    switch (rel.type) {
        case RelType::PointOnLine: {
            Vec2 p = prims.point_xy(rel.subject);
            const auto& l = prims.find_geo(rel.objects[0])->as_line();
            if (dist_point_line(p, l) > tol.on_line) return fail(reason, "point off the line");
            return true;
        }
        case RelType::PointOnCircle: {
            Vec2 p = prims.point_xy(rel.subject);
            const auto& c = prims.find_geo(rel.objects[0])->as_circle();
            if (dist_point_circle(p, c) > tol.on_circle) return fail(reason, "point off the circle");
            return true;
        }
        case RelType::CenterOfCircle: {
            Vec2 p = prims.point_xy(rel.subject);
            const auto& c = prims.find_geo(rel.objects[0])->as_circle();
            if (p.dist(c.center()) > tol.on_circle) return fail(reason, "point is not the center");
            return true;
        }
        case RelType::Perpendicular: {
            const auto* s = prims.find_nongeo(rel.subject);
            const auto& l1 = prims.find_geo(rel.objects[0])->as_line();
            const auto& l2 = prims.find_geo(rel.objects[1])->as_line();
            if (std::abs(segment_angle_deg(l1, l2) - 90.0) > tol.perp_angle_deg)
                return fail(reason, "lines are not at a right angle");
            Vec2 c = s->box.center();
            if (dist_point_line(c, l1) > tol.symbol_radius || dist_point_line(c, l2) > tol.symbol_radius)
                return fail(reason, "symbol too far from the lines");
            return true;
        }
        case RelType::AngleEquality: {
            const auto* s = prims.find_nongeo(rel.subject);
            // the symbol anchors one of the listed vertices
            for (std::size_t i = 1; i < rel.objects.size(); i += 3) {
                Vec2 v = prims.point_xy(rel.objects[i]);
                if (s->box.center().dist(v) <= tol.symbol_radius) return true;
            }
            return fail(reason, "symbol anchors none of the listed vertices");
        }
        case RelType::BarEquality:
        case RelType::ParallelEquality: {
            const auto* s = prims.find_nongeo(rel.subject);
            // bars and chevrons sit by one of the grouped primitives
            Vec2 c = s->box.center();
            for (const auto& o : rel.objects) {
                const auto* g = prims.find_geo(o);
                if (g && dist_to_locus(c, *g) <= tol.symbol_radius) return true;
            }
            return fail(reason, "symbol sits by none of the grouped primitives");
        }
        case RelType::Text2Point:
        case RelType::Text2Line:
        case RelType::Text2Len:
        case RelType::Text2Area: {
            const auto* t = prims.find_nongeo(rel.subject);
            if (rel.type == RelType::Text2Area) {
                const auto& c = prims.find_geo(rel.objects[0])->as_circle();
                if (t->box.center().dist(c.center()) >= c.r) return fail(reason, "text outside the circle");
                return true;
            }
            if (!near_subject(t->box, tol.text_radius)) return fail(reason, "text too far from target");
            return true;
        }
        case RelType::Text2Angle:
        case RelType::Text2Degree: {
            const auto* t = prims.find_nongeo(rel.subject);
            if (rel.objects.size() == 3) {
                Vec2 v = prims.point_xy(rel.objects[1]);
                if (t->box.center().dist(v) > tol.text_radius)
                    return fail(reason, "text too far from the vertex");
                return true;
            }
            return near_subject(t->box, tol.text_radius) ? true
                                                         : fail(reason, "text too far from the arc");
        }
        case RelType::ArrowIndication: {
            const auto* t = prims.find_nongeo(rel.subject);
            const auto* s = prims.find_nongeo(rel.objects[0]);
            if (box_gap(t->box, s->box) > tol.union_gap)
                return fail(reason, "text and head boxes too far apart");
            return true;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Exact predicates.

double dist_point_line(const Vec2& p, const LinePos& l) {
    Vec2 a = l.a(), b = l.b();
    Vec2 ab = b - a;
    double len2 = ab.dot(ab);
    if (len2 <= 0.0) throw std::invalid_argument("degenerate segment");
    double t = (p - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return p.dist(a + ab * t);
}

double dist_point_circle(const Vec2& p, const CirclePos& c) {
    return std::abs(p.dist(c.center()) - c.r);
}

bool point_on_ray(const Vec2& vertex, const Vec2& arm, const Vec2& q, double tol) {
    Vec2 d = arm - vertex;
    double len = d.norm();
    if (len <= 0.0) throw std::invalid_argument("ray direction is undefined");
    d = d * (1.0 / len);
    Vec2 vq = q - vertex;
    double t = vq.dot(d);
    if (t < 0.0) return t >= -tol && vq.norm() <= tol;  // slightly behind the vertex
    double perp = std::abs(vq.cross(d));
    if (perp > tol) return false;
    return vq.norm() > tol;  // the vertex itself is not on its own arm
}

std::optional<Vec2> line_line_intersection(const LinePos& a, const LinePos& b) {
    Vec2 p = a.a(), r = a.b() - a.a();
    Vec2 q = b.a(), s = b.b() - b.a();
    double denom = r.cross(s);
    if (std::abs(denom) < 1e-12 * r.norm() * s.norm()) return std::nullopt;
    double t = (q - p).cross(s) / denom;
    return p + r * t;
}

std::vector<Vec2> line_circle_intersections(const LinePos& l, const CirclePos& c) {
    Vec2 a = l.a();
    Vec2 d = (l.b() - l.a()).normalized();
    Vec2 ac = c.center() - a;
    double t0 = ac.dot(d);
    Vec2 foot = a + d * t0;
    double h = foot.dist(c.center());
    if (h > c.r) return {};
    double half = std::sqrt(std::max(0.0, c.r * c.r - h * h));
    if (half < 1e-9) return {foot};
    return {a + d * (t0 - half), a + d * (t0 + half)};
}

double segment_angle_deg(const LinePos& a, const LinePos& b) {
    Vec2 da = a.dir(), db = b.dir();
    double cosv = std::clamp(std::abs(da.dot(db)), 0.0, 1.0);
    return std::acos(cosv) * 180.0 / M_PI;
}

double box_gap(const BoxPos& a, const BoxPos& b) {
    double dx = std::max({a.x1 - b.x2, b.x1 - a.x2, 0.0});
    double dy = std::max({a.y1 - b.y2, b.y1 - a.y2, 0.0});
    return std::hypot(dx, dy);
}

double box_iou(const BoxPos& a, const BoxPos& b) {
    double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    double inter = ix * iy;
    double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

// ---------------------------------------------------------------------------
// Canonical naming.

std::pair<std::string, std::string> canonical_line_points(const std::vector<NamedPoint>& pts) {
    if (pts.size() < 2) throw std::invalid_argument("need at least two points to name a line");
    // project on the direction of maximum spread; extremes are the farthest pair
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double d = pts[i].xy.dist(pts[j].xy);
            if (d > best + 1e-9 ||
                (d > best - 1e-9 && std::minmax(pts[i].id, pts[j].id) <
                                        std::minmax(pts[bi].id, pts[bj].id))) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    auto [lo, hi] = std::minmax(pts[bi].id, pts[bj].id);
    return {lo, hi};
}

std::array<std::string, 3> canonical_angle(const std::string& vertex_id, const Vec2& vertex,
                                           const std::vector<NamedPoint>& arm1,
                                           const std::vector<NamedPoint>& arm2) {
    if (arm1.empty() || arm2.empty())
        throw std::invalid_argument("angle arms need at least one candidate each");
    auto farthest = [&](const std::vector<NamedPoint>& arm) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < arm.size(); ++i) {
            double di = arm[i].xy.dist(vertex), db = arm[best].xy.dist(vertex);
            if (di > db + 1e-9 || (di > db - 1e-9 && arm[i].id < arm[best].id)) best = i;
        }
        return arm[best].id;
    };
    std::string a = farthest(arm1), b = farthest(arm2);
    std::string fwd = a + "," + vertex_id + "," + b;
    std::string rev = b + "," + vertex_id + "," + a;
    if (rev < fwd) std::swap(a, b);
    return {a, vertex_id, b};
}

}  // namespace geodiag
