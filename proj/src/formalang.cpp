#include "geodiag/formalang.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace geodiag {

namespace {

bool numeric_token(const std::string& s) {
    if (s.empty()) return false;
    bool dot = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (dot || i == 0 || i + 1 == s.size()) return false;
            dot = true;
        } else if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

bool identifier_token(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Lexer + recursive-descent parser.

struct Lexer {
    const std::string& src;
    int line;
    std::size_t pos = 0;

    Lexer(const std::string& s, int line_no) : src(s), line(line_no) {}

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\r')) ++pos;
    }

    [[noreturn]] void err(const std::string& msg) const {
        throw ParseError(line, static_cast<int>(pos) + 1, msg);
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    void expect(char c) {
        if (peek() != c) err(std::string("expected '") + c + "'");
        ++pos;
    }

    std::string atom() {
        skip_ws();
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' ||
                src[pos] == '.'))
            ++pos;
        if (pos == start) err("expected an identifier or number");
        std::string tok = src.substr(start, pos - start);
        if (!numeric_token(tok) && !identifier_token(tok)) err("malformed token '" + tok + "'");
        return tok;
    }
};

const std::map<std::string, std::vector<int>>& arity_table() {
    static const std::map<std::string, std::vector<int>> t = {
        {"Point", {1}},
        {"Line", {1, 2}},
        {"Circle", {2}},
        {"Angle", {1, 3}},
        {"Arc", {2, 3}},
        {"PointLiesOnLine", {2}},
        {"PointLiesOnCircle", {2}},
        {"Perpendicular", {2}},
        {"Parallel", {2}},
        {"Equals", {2}},
        {"MeasureOf", {1}},
        {"LengthOf", {1}},
    };
    return t;
}

bool is_call(const PropNode& p, const char* head, int arity = -1) {
    return !p.leaf() && p.head == head &&
           (arity < 0 || static_cast<int>(p.args.size()) == arity);
}

void validate_node(const PropNode& p, Lexer& lx) {
    if (p.leaf()) return;
    auto it = arity_table().find(p.head);
    if (it == arity_table().end()) lx.err("unknown predicate '" + p.head + "'");
    const auto& arities = it->second;
    if (std::find(arities.begin(), arities.end(), static_cast<int>(p.args.size())) ==
        arities.end()) {
        std::string want;
        for (std::size_t i = 0; i < arities.size(); ++i)
            want += (i ? " or " : "") + std::to_string(arities[i]);
        lx.err(p.head + " expects " + want + " argument" + (want == "1" ? "" : "s") + ", got " +
               std::to_string(p.args.size()));
    }

    auto leaf_args = [&](const PropNode& n) {
        for (const auto& a : n.args)
            if (!a.leaf()) lx.err(n.head + " takes plain names, not nested terms");
    };

    if (p.head == "Point" || p.head == "Line" || p.head == "Circle" || p.head == "Angle" ||
        p.head == "Arc")
        leaf_args(p);
    if (p.head == "PointLiesOnLine") {
        if (!p.args[0].leaf()) lx.err("PointLiesOnLine subject must be a point name");
        if (!is_call(p.args[1], "Line", 2)) lx.err("PointLiesOnLine object must be Line(a, b)");
    }
    if (p.head == "PointLiesOnCircle") {
        if (!p.args[0].leaf()) lx.err("PointLiesOnCircle subject must be a point name");
        if (!is_call(p.args[1], "Circle", 2)) lx.err("PointLiesOnCircle object must be a Circle term");
    }
    if (p.head == "Perpendicular" || p.head == "Parallel") {
        for (const auto& a : p.args)
            if (!is_call(a, "Line", 2)) lx.err(p.head + " arguments must be Line(a, b) terms");
    }
    if (p.head == "MeasureOf") {
        if (!is_call(p.args[0], "Angle") && !is_call(p.args[0], "Arc"))
            lx.err("MeasureOf takes an Angle or Arc term");
    }
    if (p.head == "LengthOf") {
        if (!is_call(p.args[0], "Line") && !is_call(p.args[0], "Arc"))
            lx.err("LengthOf takes a Line or Arc term");
    }
}

PropNode parse_expr(Lexer& lx) {
    PropNode n;
    n.head = lx.atom();
    if (lx.peek() == '(') {
        lx.expect('(');
        if (lx.peek() == ')') lx.err("empty argument list");
        n.args.push_back(parse_expr(lx));
        while (lx.peek() == ',') {
            lx.expect(',');
            n.args.push_back(parse_expr(lx));
        }
        lx.expect(')');
        validate_node(n, lx);
    } else if (numeric_token(n.head)) {
        // number leaf, fine
    }
    return n;
}

}  // namespace

std::string serialize(const PropNode& p) {
    if (p.leaf()) return p.head;
    std::string out = p.head;
    out += '(';
    for (std::size_t i = 0; i < p.args.size(); ++i) {
        if (i) out += ", ";
        out += serialize(p.args[i]);
    }
    out += ')';
    return out;
}

std::string serialize(const PropositionSet& set) {
    std::string out;
    for (const auto& p : set.props) {
        out += serialize(p);
        out += '\n';
    }
    return out;
}

PropGroup classify_prop(const PropNode& p) {
    if (p.leaf()) return PropGroup::GeoShape;
    if (p.head == "Point" || p.head == "Circle" || p.head == "Arc" ||
        (p.head == "Line" && p.args.size() == 2) || (p.head == "Angle" && p.args.size() == 3))
        return PropGroup::GeoShape;
    if (p.head == "PointLiesOnLine" || p.head == "PointLiesOnCircle") return PropGroup::Geo2Geo;
    if (p.head == "Line" || p.head == "Angle") return PropGroup::Text2Geo;  // unary label forms
    if (p.head == "Perpendicular" || p.head == "Parallel") return PropGroup::Sym2Geo;
    if (p.head == "Equals") {
        for (const auto& a : p.args) {
            if (a.leaf() && numeric_token(a.head)) return PropGroup::Text2Geo;
            if (is_call(a, "MeasureOf", 1) && is_call(a.args[0], "Angle", 1))
                return PropGroup::Text2Geo;
        }
        return PropGroup::Sym2Geo;
    }
    return PropGroup::Sym2Geo;
}

void PropositionSet::sort_and_dedup() {
    std::stable_sort(props.begin(), props.end(), [](const PropNode& a, const PropNode& b) {
        int ga = static_cast<int>(classify_prop(a)), gb = static_cast<int>(classify_prop(b));
        if (ga != gb) return ga < gb;
        return serialize(a) < serialize(b);
    });
    props.erase(std::unique(props.begin(), props.end(),
                            [](const PropNode& a, const PropNode& b) {
                                return serialize(a) == serialize(b);
                            }),
                props.end());
}

PropNode parse_proposition(const std::string& text, int line_no) {
    Lexer lx(text, line_no);
    PropNode n = parse_expr(lx);
    lx.skip_ws();
    if (lx.pos != text.size()) lx.err("trailing characters after proposition");
    if (n.leaf()) lx.err("a proposition must be a predicate application");
    return n;
}

namespace {

PropositionSet parse_lines(const std::string& text, std::vector<std::string>* errors) {
    PropositionSet set;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) trimmed.pop_back();
        std::size_t start = trimmed.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        try {
            set.props.push_back(parse_proposition(trimmed, line_no));
        } catch (const ParseError& e) {
            if (!errors) throw;
            errors->push_back(e.what());
        }
    }
    return set;
}

}  // namespace

PropositionSet parse_propositions(const std::string& text) { return parse_lines(text, nullptr); }

PropositionSet parse_propositions_lenient(const std::string& text,
                                          std::vector<std::string>* errors) {
    return parse_lines(text, errors);
}

// ---------------------------------------------------------------------------
// Canonicalization.

std::vector<NamedPoint> GeoContext::all_points() const {
    std::vector<NamedPoint> out;
    out.reserve(points.size());
    for (const auto& [name, xy] : points) out.push_back({name, xy});
    return out;
}

namespace {

// Angular position on circle c, radians in [0, 2pi).
double circ_angle(const CirclePos& c, const Vec2& p) {
    double a = std::atan2(p.y - c.y, p.x - c.x);
    if (a < 0) a += 2 * M_PI;
    return a;
}

double ccw_span(double from, double to) {
    double s = to - from;
    while (s < 0) s += 2 * M_PI;
    while (s >= 2 * M_PI) s -= 2 * M_PI;
    return s;
}

PropNode leaf(const std::string& name) { return PropNode{name, {}}; }

PropNode canonical_line_node(const PropNode& p, const GeoContext& ctx) {
    // two-argument Line: stretch the name to the extreme collinear points
    auto ia = ctx.points.find(p.args[0].head);
    auto ib = ctx.points.find(p.args[1].head);
    std::string a = p.args[0].head, b = p.args[1].head;
    if (ia != ctx.points.end() && ib != ctx.points.end() && ia->second.dist(ib->second) > 1e-9) {
        Vec2 origin = ia->second;
        Vec2 d = (ib->second - origin).normalized();
        std::vector<NamedPoint> on_line;
        for (const auto& [name, xy] : ctx.points) {
            if (std::abs((xy - origin).cross(d)) <= ctx.tol) on_line.push_back({name, xy});
        }
        auto [lo, hi] = canonical_line_points(on_line);
        a = lo;
        b = hi;
    } else if (b < a) {
        std::swap(a, b);
    }
    return PropNode{"Line", {leaf(a), leaf(b)}};
}

PropNode canonical_angle_node(const PropNode& p, const GeoContext& ctx) {
    auto ia = ctx.points.find(p.args[0].head);
    auto iv = ctx.points.find(p.args[1].head);
    auto ib = ctx.points.find(p.args[2].head);
    if (ia == ctx.points.end() || iv == ctx.points.end() || ib == ctx.points.end())
        return p;
    Vec2 v = iv->second;
    if (ia->second.dist(v) < 1e-9 || ib->second.dist(v) < 1e-9) return p;
    std::vector<NamedPoint> arm1, arm2;
    for (const auto& [name, xy] : ctx.points) {
        if (name == p.args[1].head) continue;
        if (point_on_ray(v, ia->second, xy, ctx.tol)) arm1.push_back({name, xy});
        if (point_on_ray(v, ib->second, xy, ctx.tol)) arm2.push_back({name, xy});
    }
    if (arm1.empty() || arm2.empty()) return p;  // degenerate, keep as written
    auto triple = canonical_angle(p.args[1].head, v, arm1, arm2);
    return PropNode{"Angle", {leaf(triple[0]), leaf(triple[1]), leaf(triple[2])}};
}

// The circle whose locus holds every listed point within tolerance.
const CirclePos* find_circle_through(const std::vector<Vec2>& pts, const GeoContext& ctx) {
    for (const auto& [tok, circ] : ctx.radius_tokens) {
        bool all = true;
        for (const auto& p : pts)
            if (dist_point_circle(p, circ) > ctx.tol) {
                all = false;
                break;
            }
        if (all) return &circ;
    }
    return nullptr;
}

PropNode canonical_arc_node(const PropNode& p, const GeoContext& ctx) {
    std::vector<std::string> names;
    std::vector<Vec2> coords;
    for (const auto& a : p.args) {
        names.push_back(a.head);
        auto it = ctx.points.find(a.head);
        if (it == ctx.points.end()) {
            // geometry unknown: normalize endpoint order only
            std::string lo = p.args.front().head, hi = p.args.back().head;
            if (hi < lo) std::swap(lo, hi);
            PropNode out{"Arc", {leaf(lo)}};
            if (p.args.size() == 3) out.args.push_back(p.args[1]);
            out.args.push_back(leaf(hi));
            return out;
        }
        coords.push_back(it->second);
    }

    const CirclePos* circ = find_circle_through(coords, ctx);
    if (!circ) {
        std::string lo = names.front(), hi = names.back();
        if (hi < lo) std::swap(lo, hi);
        PropNode out{"Arc", {leaf(lo)}};
        if (p.args.size() == 3) out.args.push_back(p.args[1]);
        out.args.push_back(leaf(hi));
        return out;
    }

    double a0 = circ_angle(*circ, coords.front());
    double a1 = circ_angle(*circ, coords.back());
    double span;
    double start;  // arc runs ccw from start over span
    if (p.args.size() == 2) {
        // two points name the minor arc
        double s01 = ccw_span(a0, a1);
        if (s01 <= M_PI) {
            start = a0;
            span = s01;
        } else {
            start = a1;
            span = 2 * M_PI - s01;
        }
    } else {
        double mid = circ_angle(*circ, coords[1]);
        double s01 = ccw_span(a0, a1);
        if (ccw_span(a0, mid) <= s01) {
            start = a0;
            span = s01;
        } else {
            start = a1;
            span = 2 * M_PI - s01;
        }
    }

    std::string lo = names.front(), hi = names.size() == 3 ? names[2] : names[1];
    if (hi < lo) std::swap(lo, hi);
    if (span <= M_PI + 1e-9) return PropNode{"Arc", {leaf(lo), leaf(hi)}};

    // major arc: keep a via point, the lexicographically smallest interior one
    const double margin = 2.0 * M_PI / 180.0;
    std::string via;
    for (const auto& [name, xy] : ctx.points) {
        if (dist_point_circle(xy, *circ) > ctx.tol) continue;
        double off = ccw_span(start, circ_angle(*circ, xy));
        if (off < margin || off > span - margin) continue;
        if (via.empty() || name < via) via = name;
    }
    if (via.empty()) return PropNode{"Arc", {leaf(lo), leaf(hi)}};
    return PropNode{"Arc", {leaf(lo), leaf(via), leaf(hi)}};
}

}  // namespace

PropNode canonicalize(const PropNode& p, const GeoContext& ctx) {
    if (p.leaf()) return p;
    PropNode out{p.head, {}};
    for (const auto& a : p.args) out.args.push_back(canonicalize(a, ctx));

    if (p.head == "Line" && p.args.size() == 2) return canonical_line_node(out, ctx);
    if (p.head == "Angle" && p.args.size() == 3) return canonical_angle_node(out, ctx);
    if (p.head == "Arc") return canonical_arc_node(out, ctx);
    if (p.head == "Equals" || p.head == "Perpendicular" || p.head == "Parallel") {
        if (serialize(out.args[1]) < serialize(out.args[0])) std::swap(out.args[0], out.args[1]);
    }
    return out;
}

bool equivalent(const PropNode& a, const PropNode& b, const GeoContext& ctx) {
    return serialize(canonicalize(a, ctx)) == serialize(canonicalize(b, ctx));
}

PropNode rename_leaves(const PropNode& p, const std::map<std::string, std::string>& m) {
    if (p.leaf()) {
        auto it = m.find(p.head);
        return it == m.end() ? p : leaf(it->second);
    }
    PropNode out{p.head, {}};
    for (const auto& a : p.args) out.args.push_back(rename_leaves(a, m));
    return out;
}

// ---------------------------------------------------------------------------
// Generation.

std::map<std::string, std::string> proposition_point_names(const PrimitiveSet& prims,
                                                           const std::vector<Relation>& relations) {
    std::map<std::string, std::string> names;
    for (const auto& p : prims.points) names[p.id] = p.id;
    std::set<std::string> used;
    for (const auto& rel : relations) {
        if (rel.type != RelType::Text2Point || rel.objects.size() != 1) continue;
        const auto* t = prims.find_nongeo(rel.subject);
        if (!t || !identifier_token(t->content)) continue;
        if (used.count(t->content)) continue;
        auto it = names.find(rel.objects[0]);
        if (it == names.end()) continue;
        it->second = t->content;
        used.insert(t->content);
    }
    return names;
}

GeoContext make_context(const PrimitiveSet& prims, const std::vector<Relation>& relations) {
    GeoContext ctx;
    auto names = proposition_point_names(prims, relations);
    for (const auto& p : prims.points) ctx.points[names[p.id]] = p.as_point().xy();
    for (std::size_t i = 0; i < prims.circles.size(); ++i)
        ctx.radius_tokens["radius_" + std::to_string(i)] = prims.circles[i].as_circle();
    return ctx;
}

namespace {

struct Generator {
    const PrimitiveSet& prims;
    const std::vector<Relation>& relations;
    std::map<std::string, std::string> names;          // point id -> proposition name
    std::map<std::string, std::string> radius_of;      // circle id -> radius token
    std::map<std::string, std::vector<std::string>> on_line;    // line id -> interior point ids
    std::map<std::string, std::vector<std::string>> on_circle;  // circle id -> point ids
    std::map<std::string, std::string> center_of;               // circle id -> center point id
    GeoContext ctx;

    Generator(const PrimitiveSet& p, const std::vector<Relation>& r) : prims(p), relations(r) {
        names = proposition_point_names(prims, relations);
        for (std::size_t i = 0; i < prims.circles.size(); ++i)
            radius_of[prims.circles[i].id] = "radius_" + std::to_string(i);
        for (const auto& rel : relations) {
            if (rel.type == RelType::PointOnLine && rel.objects.size() == 1)
                on_line[rel.objects[0]].push_back(rel.subject);
            if (rel.type == RelType::PointOnCircle && rel.objects.size() == 1)
                on_circle[rel.objects[0]].push_back(rel.subject);
            if (rel.type == RelType::CenterOfCircle && rel.objects.size() == 1)
                center_of[rel.objects[0]] = rel.subject;
        }
        for (const auto& c : prims.circles)
            if (!c.center_point.empty()) center_of.emplace(c.id, c.center_point);
        ctx = make_context(prims, relations);
    }

    std::string name_of(const std::string& point_id) const {
        auto it = names.find(point_id);
        return it == names.end() ? point_id : it->second;
    }

    // Line(a, b) with the extreme on-line points; falls back to endpoints.
    std::optional<PropNode> line_node(const std::string& line_id) const {
        const auto* l = prims.find_geo(line_id);
        if (!l || l->cls != GeoClass::Line) return std::nullopt;
        std::vector<NamedPoint> pts;
        auto add = [&](const std::string& pid) {
            const auto* p = prims.find_geo(pid);
            if (p && p->cls == GeoClass::Point) pts.push_back({name_of(pid), p->as_point().xy()});
        };
        for (const auto& e : l->endpoints)
            if (!e.empty()) add(e);
        auto it = on_line.find(line_id);
        if (it != on_line.end())
            for (const auto& pid : it->second) add(pid);
        if (pts.size() < 2) return std::nullopt;
        auto [a, b] = canonical_line_points(pts);
        return PropNode{"Line", {leaf(a), leaf(b)}};
    }

    std::optional<PropNode> circle_node(const std::string& circle_id) const {
        const auto* c = prims.find_geo(circle_id);
        if (!c || c->cls != GeoClass::Circle) return std::nullopt;
        auto rit = radius_of.find(circle_id);
        if (rit == radius_of.end()) return std::nullopt;
        auto cit = center_of.find(circle_id);
        std::string center = cit != center_of.end() ? name_of(cit->second) : circle_id;
        return PropNode{"Circle", {leaf(center), leaf(rit->second)}};
    }

    // Arc(a, b) or Arc(a, via, b) for the drawn side of an arc circle.
    std::optional<PropNode> arc_node(const std::string& circle_id) const {
        const auto* c = prims.find_geo(circle_id);
        if (!c || c->cls != GeoClass::Circle || c->circle_style != CircleStyle::Arc)
            return std::nullopt;
        if (c->arc_endpoints[0].empty() || c->arc_endpoints[1].empty()) return std::nullopt;
        const auto* e0 = prims.find_geo(c->arc_endpoints[0]);
        const auto* e1 = prims.find_geo(c->arc_endpoints[1]);
        if (!e0 || !e1) return std::nullopt;
        const CirclePos& geo = c->as_circle();
        double a0 = circ_angle(geo, e0->as_point().xy());
        double a1 = circ_angle(geo, e1->as_point().xy());
        double span = ccw_span(a0, a1);  // drawn arc runs ccw from endpoint 0 to 1

        std::string n0 = name_of(c->arc_endpoints[0]), n1 = name_of(c->arc_endpoints[1]);
        std::string lo = std::min(n0, n1), hi = std::max(n0, n1);
        if (span <= M_PI + 1e-9) return PropNode{"Arc", {leaf(lo), leaf(hi)}};

        const double margin = 2.0 * M_PI / 180.0;
        std::string via;
        for (const auto& p : prims.points) {
            if (dist_point_circle(p.as_point().xy(), geo) > ctx.tol) continue;
            double off = ccw_span(a0, circ_angle(geo, p.as_point().xy()));
            if (off < margin || off > span - margin) continue;
            std::string nm = name_of(p.id);
            if (via.empty() || nm < via) via = nm;
        }
        if (via.empty()) return PropNode{"Arc", {leaf(lo), leaf(hi)}};
        return PropNode{"Arc", {leaf(lo), leaf(via), leaf(hi)}};
    }

    // line or arc node for a bar/length target
    std::optional<PropNode> span_node(const std::string& id) const {
        const auto* g = prims.find_geo(id);
        if (!g) return std::nullopt;
        return g->cls == GeoClass::Line ? line_node(id) : arc_node(id);
    }

    std::optional<PropNode> angle_node(const std::vector<std::string>& ids, std::size_t at) const {
        if (at + 3 > ids.size()) return std::nullopt;
        for (std::size_t i = 0; i < 3; ++i) {
            const auto* p = prims.find_geo(ids[at + i]);
            if (!p || p->cls != GeoClass::Point) return std::nullopt;
        }
        return PropNode{"Angle",
                        {leaf(name_of(ids[at])), leaf(name_of(ids[at + 1])), leaf(name_of(ids[at + 2]))}};
    }

    static PropNode measure(PropNode arg) { return PropNode{"MeasureOf", {std::move(arg)}}; }
    static PropNode length(PropNode arg) { return PropNode{"LengthOf", {std::move(arg)}}; }
    static PropNode equals(PropNode a, PropNode b) {
        return PropNode{"Equals", {std::move(a), std::move(b)}};
    }

    // degree / length value from text content; empty when unusable
    static std::string value_token(std::string content) {
        // strip a trailing degree sign (two bytes in utf-8)
        const std::string deg = "\xC2\xB0";
        if (content.size() >= deg.size() &&
            content.compare(content.size() - deg.size(), deg.size(), deg) == 0)
            content.erase(content.size() - deg.size());
        if (numeric_token(content) || identifier_token(content)) return content;
        return {};
    }

    PropositionSet run() {
        PropositionSet set;
        auto emit = [&](std::optional<PropNode> n) {
            if (n) set.props.push_back(std::move(*n));
        };

        for (const auto& p : prims.points) emit(PropNode{"Point", {leaf(name_of(p.id))}});
        for (const auto& l : prims.lines) emit(line_node(l.id));
        for (const auto& c : prims.circles) {
            emit(circle_node(c.id));
            emit(arc_node(c.id));
        }

        for (const auto& rel : relations) {
            switch (rel.type) {
                case RelType::PointOnLine: {
                    auto ln = line_node(rel.objects[0]);
                    if (ln)
                        emit(PropNode{"PointLiesOnLine", {leaf(name_of(rel.subject)), *ln}});
                    break;
                }
                case RelType::PointOnCircle: {
                    auto cn = circle_node(rel.objects[0]);
                    if (cn)
                        emit(PropNode{"PointLiesOnCircle", {leaf(name_of(rel.subject)), *cn}});
                    break;
                }
                case RelType::CenterOfCircle:
                    emit(circle_node(rel.objects[0]));
                    break;
                case RelType::Text2Point: {
                    const auto* t = prims.find_nongeo(rel.subject);
                    if (t && identifier_token(t->content))
                        emit(PropNode{"Point", {leaf(t->content)}});
                    break;
                }
                case RelType::Text2Line: {
                    const auto* t = prims.find_nongeo(rel.subject);
                    if (t && identifier_token(t->content))
                        emit(PropNode{"Line", {leaf(t->content)}});
                    break;
                }
                case RelType::Text2Angle: {
                    const auto* t = prims.find_nongeo(rel.subject);
                    auto an = angle_node(rel.objects, 0);
                    if (t && an && !value_token(t->content).empty())
                        emit(equals(measure(*an),
                                    measure(PropNode{"Angle", {leaf(value_token(t->content))}})));
                    break;
                }
                case RelType::Text2Degree: {
                    const auto* t = prims.find_nongeo(rel.subject);
                    if (!t) break;
                    std::string v = value_token(t->content);
                    if (v.empty()) break;
                    if (rel.objects.size() == 3) {
                        auto an = angle_node(rel.objects, 0);
                        if (an) emit(equals(measure(*an), leaf(v)));
                    } else if (rel.objects.size() == 1) {
                        auto arc = arc_node(rel.objects[0]);
                        if (arc) emit(equals(measure(*arc), leaf(v)));
                    }
                    break;
                }
                case RelType::Text2Len: {
                    const auto* t = prims.find_nongeo(rel.subject);
                    if (!t || rel.objects.size() != 1) break;
                    std::string v = value_token(t->content);
                    if (v.empty()) break;
                    auto sn = span_node(rel.objects[0]);
                    if (sn) emit(equals(length(*sn), leaf(v)));
                    break;
                }
                case RelType::Text2Area:
                case RelType::ArrowIndication:
                    break;  // no proposition
                case RelType::Perpendicular: {
                    auto l1 = line_node(rel.objects[0]);
                    auto l2 = line_node(rel.objects[1]);
                    if (l1 && l2) emit(PropNode{"Perpendicular", {*l1, *l2}});
                    break;
                }
                case RelType::AngleEquality: {
                    std::vector<PropNode> angles;
                    for (std::size_t i = 0; i + 3 <= rel.objects.size(); i += 3) {
                        auto an = angle_node(rel.objects, i);
                        if (an) angles.push_back(*an);
                    }
                    for (std::size_t i = 0; i < angles.size(); ++i)
                        for (std::size_t j = i + 1; j < angles.size(); ++j)
                            emit(equals(measure(angles[i]), measure(angles[j])));
                    break;
                }
                case RelType::BarEquality: {
                    std::vector<PropNode> spans;
                    for (const auto& o : rel.objects) {
                        auto sn = span_node(o);
                        if (sn) spans.push_back(*sn);
                    }
                    for (std::size_t i = 0; i < spans.size(); ++i)
                        for (std::size_t j = i + 1; j < spans.size(); ++j)
                            emit(equals(length(spans[i]), length(spans[j])));
                    break;
                }
                case RelType::ParallelEquality: {
                    std::vector<PropNode> lns;
                    for (const auto& o : rel.objects) {
                        auto ln = line_node(o);
                        if (ln) lns.push_back(*ln);
                    }
                    for (std::size_t i = 0; i < lns.size(); ++i)
                        for (std::size_t j = i + 1; j < lns.size(); ++j)
                            emit(PropNode{"Parallel", {lns[i], lns[j]}});
                    break;
                }
            }
        }

        for (auto& p : set.props) p = canonicalize(p, ctx);
        set.sort_and_dedup();
        return set;
    }
};

}  // namespace

PropositionSet generate_propositions(const PrimitiveSet& prims,
                                     const std::vector<Relation>& relations) {
    return Generator(prims, relations).run();
}

}  // namespace geodiag
