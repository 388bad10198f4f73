#include "geodiag/relate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "geodiag/log.hpp"
#include "geodiag/scene.hpp"

namespace geodiag {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

double angle_between(const Vec2& a, const Vec2& b) {
    double na = a.norm(), nb = b.norm();
    if (na <= 0 || nb <= 0) return kPi;
    return std::acos(std::clamp(a.dot(b) / (na * nb), -1.0, 1.0));
}

double locus_dist(const Vec2& p, const GeoPrimitive& g) {
    switch (g.cls) {
        case GeoClass::Point: return p.dist(g.as_point().xy());
        case GeoClass::Line: return dist_point_line(p, g.as_line());
        case GeoClass::Circle: return dist_point_circle(p, g.as_circle());
    }
    return 1e300;
}

bool in_slot(const std::array<std::string, 2>& slot, const std::string& id) {
    return slot[0] == id || slot[1] == id;
}

// Midpoint of a line, or of an arc's drawn span.
std::optional<Vec2> span_midpoint(const GeoPrimitive& g, const PrimitiveSet& prims) {
    if (g.cls == GeoClass::Line) return g.as_line().midpoint();
    if (g.cls != GeoClass::Circle || g.circle_style != CircleStyle::Arc) return std::nullopt;
    if (g.arc_endpoints[0].empty() || g.arc_endpoints[1].empty()) return std::nullopt;
    const CirclePos& c = g.as_circle();
    Vec2 e0 = prims.point_xy(g.arc_endpoints[0]);
    Vec2 e1 = prims.point_xy(g.arc_endpoints[1]);
    double a0 = std::atan2(e0.y - c.y, e0.x - c.x);
    double a1 = std::atan2(e1.y - c.y, e1.x - c.x);
    double span = a1 - a0;
    while (span < 0) span += 2 * kPi;
    double mid = a0 + span / 2;
    return c.center() + Vec2{std::cos(mid), std::sin(mid)} * c.r;
}

struct Ray {
    Vec2 dir;
    std::vector<NamedPoint> named;  // on-ray points, farthest-capable candidates
};

std::vector<Ray> rays_at(const PrimitiveSet& prims, const Vec2& v, const RuleConfig& cfg) {
    std::vector<Ray> rays;
    for (const auto& l : prims.lines) {
        const LinePos& s = l.as_line();
        if (dist_point_line(v, s) > cfg.tol.on_line) continue;
        Vec2 u = s.dir();
        double t = (v - s.a()).dot(u);
        if (t >= cfg.min_ray_len) rays.push_back({u * -1.0, {}});
        if (s.length() - t >= cfg.min_ray_len) rays.push_back({u, {}});
    }
    std::sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) {
        return std::atan2(a.dir.y, a.dir.x) < std::atan2(b.dir.y, b.dir.x);
    });
    rays.erase(std::unique(rays.begin(), rays.end(),
                           [](const Ray& a, const Ray& b) {
                               return angle_between(a.dir, b.dir) < deg2rad(0.5);
                           }),
               rays.end());
    for (auto& r : rays)
        for (const auto& p : prims.points) {
            Vec2 q = p.as_point().xy();
            if (q.dist(v) < 1e-9) continue;
            if (point_on_ray(v, v + r.dir * 10.0, q, cfg.on_ray_tol)) r.named.push_back({p.id, q});
        }
    rays.erase(std::remove_if(rays.begin(), rays.end(),
                              [](const Ray& r) { return r.named.empty(); }),
               rays.end());
    return rays;
}

struct WedgeCand {
    std::array<std::string, 3> triple;
    double wedge_ang = 0;  // radians
    double dev = 0;        // bisector vs anchor direction
    bool contains = false; // anchor direction inside the wedge
};

std::vector<WedgeCand> wedges_at(const PrimitiveSet& prims, const std::string& vid, const Vec2& v,
                                 const Vec2& anchor, const RuleConfig& cfg) {
    std::vector<WedgeCand> out;
    Vec2 d = anchor - v;
    if (d.norm() < 1e-9) return out;
    Vec2 dir = d.normalized();
    auto rays = rays_at(prims, v, cfg);
    for (std::size_t i = 0; i < rays.size(); ++i)
        for (std::size_t j = i + 1; j < rays.size(); ++j) {
            double ang = angle_between(rays[i].dir, rays[j].dir);
            if (ang < deg2rad(10.0) || ang > deg2rad(170.0)) continue;
            Vec2 bis = rays[i].dir + rays[j].dir;
            if (bis.norm() < 1e-9) continue;
            bis = bis.normalized();
            WedgeCand w;
            w.wedge_ang = ang;
            w.dev = angle_between(bis, dir);
            double a1 = angle_between(dir, rays[i].dir);
            double a2 = angle_between(dir, rays[j].dir);
            w.contains = a1 + a2 <= ang + 1e-3;
            w.triple = canonical_angle(vid, v, rays[i].named, rays[j].named);
            out.push_back(std::move(w));
        }
    std::sort(out.begin(), out.end(), [](const WedgeCand& a, const WedgeCand& b) {
        if (a.dev != b.dev) return a.dev < b.dev;
        return a.triple < b.triple;
    });
    return out;
}

// Points ordered by distance to an anchor, stable on ties.
std::vector<const GeoPrimitive*> points_by_distance(const PrimitiveSet& prims, const Vec2& anchor,
                                                    double radius) {
    std::vector<const GeoPrimitive*> pts;
    for (const auto& p : prims.points)
        if (p.as_point().xy().dist(anchor) <= radius) pts.push_back(&p);
    std::sort(pts.begin(), pts.end(), [&](const GeoPrimitive* a, const GeoPrimitive* b) {
        double da = a->as_point().xy().dist(anchor), db = b->as_point().xy().dist(anchor);
        if (da != db) return da < db;
        return a->id < b->id;
    });
    return pts;
}

Vec2 nongeo_center(const NonGeoPrimitive& n) { return n.box.center(); }

}  // namespace

std::optional<HeadTarget> head_target(const PrimitiveSet& prims, const Vec2& head_center,
                                      const Vec2& away_from_text, const RuleConfig& cfg) {
    if (away_from_text.norm() < 1e-9) return std::nullopt;
    Vec2 dir = away_from_text.normalized();
    for (double s = 2.0; s <= cfg.tol.symbol_radius; s += 1.0) {
        Vec2 p = head_center + dir * s;
        const GeoPrimitive* best = nullptr;
        double bd = 5.0;
        auto consider = [&](const GeoPrimitive& g) {
            double d = locus_dist(p, g);
            if (d < bd - 1e-9 || (std::abs(d - bd) <= 1e-9 && best && g.id < best->id)) {
                bd = d;
                best = &g;
            }
        };
        for (const auto& l : prims.lines) consider(l);
        for (const auto& c : prims.circles) consider(c);
        for (const auto& q : prims.points) consider(q);
        if (best) return HeadTarget{best->id, best->cls, p};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

CandidateGraph build_candidate_graph(const PrimitiveSet& prims, const RuleConfig& cfg) {
    CandidateGraph g;
    auto add = [&](const std::string& s, const std::string& o, RelType t) {
        g.edges.push_back({s, o, t});
    };

    for (const auto& p : prims.points) {
        Vec2 q = p.as_point().xy();
        for (const auto& l : prims.lines)
            if (dist_point_line(q, l.as_line()) <= 2 * cfg.tol.on_line)
                add(p.id, l.id, RelType::PointOnLine);
        for (const auto& c : prims.circles) {
            if (dist_point_circle(q, c.as_circle()) <= 2 * cfg.tol.on_circle)
                add(p.id, c.id, RelType::PointOnCircle);
            if (q.dist(c.as_circle().center()) <= 2 * cfg.tol.on_circle)
                add(p.id, c.id, RelType::CenterOfCircle);
        }
    }

    for (const auto& s : prims.symbols) {
        Vec2 c = nongeo_center(s);
        auto reach = [&](const GeoPrimitive& geo) {
            return locus_dist(c, geo) <= cfg.tol.symbol_radius;
        };
        for (const auto& p : prims.points)
            if (reach(p))
                for (RelType t : admissible_rel_types(PrimKind::Symbol, PrimKind::Point))
                    add(s.id, p.id, t);
        for (const auto& l : prims.lines)
            if (reach(l))
                for (RelType t : admissible_rel_types(PrimKind::Symbol, PrimKind::Line))
                    add(s.id, l.id, t);
        for (const auto& ci : prims.circles)
            if (reach(ci))
                for (RelType t : admissible_rel_types(PrimKind::Symbol, PrimKind::Circle))
                    add(s.id, ci.id, t);
    }

    for (const auto& t : prims.texts) {
        Vec2 c = nongeo_center(t);
        for (const auto& p : prims.points)
            if (locus_dist(c, p) <= cfg.tol.text_radius)
                for (RelType rt : admissible_rel_types(PrimKind::Text, PrimKind::Point))
                    add(t.id, p.id, rt);
        for (const auto& l : prims.lines)
            if (locus_dist(c, l) <= cfg.tol.text_radius)
                for (RelType rt : admissible_rel_types(PrimKind::Text, PrimKind::Line))
                    add(t.id, l.id, rt);
        for (const auto& ci : prims.circles)
            if (locus_dist(c, ci) <= cfg.tol.text_radius ||
                c.dist(ci.as_circle().center()) < ci.as_circle().r)
                for (RelType rt : admissible_rel_types(PrimKind::Text, PrimKind::Circle))
                    add(t.id, ci.id, rt);
        for (const auto& s : prims.symbols)
            if (is_head(s.symbol_class) && box_gap(t.box, s.box) <= cfg.tol.union_gap)
                add(t.id, s.id, RelType::ArrowIndication);
    }
    return g;
}

std::vector<Relation> parse_geo2geo(const PrimitiveSet& prims, const CandidateGraph& graph,
                                    const RuleConfig& cfg) {
    std::vector<Relation> out;
    for (const auto& e : graph.edges) {
        const GeoPrimitive* obj = prims.find_geo(e.object);
        if (!obj) continue;
        switch (e.type) {
            case RelType::PointOnLine: {
                if (in_slot(obj->endpoints, e.subject)) break;
                Vec2 p = prims.point_xy(e.subject);
                if (dist_point_line(p, obj->as_line()) <= cfg.tol.on_line)
                    out.push_back({e.subject, {e.object}, e.type});
                break;
            }
            case RelType::PointOnCircle: {
                if (in_slot(obj->arc_endpoints, e.subject)) break;
                Vec2 p = prims.point_xy(e.subject);
                if (dist_point_circle(p, obj->as_circle()) <= cfg.tol.on_circle)
                    out.push_back({e.subject, {e.object}, e.type});
                break;
            }
            case RelType::CenterOfCircle: {
                Vec2 p = prims.point_xy(e.subject);
                if (p.dist(obj->as_circle().center()) <= cfg.tol.on_circle)
                    out.push_back({e.subject, {e.object}, e.type});
                break;
            }
            default: break;  // attachment families live elsewhere
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

SymbolAttach attach_symbols(const PrimitiveSet& prims, const RuleConfig& cfg) {
    SymbolAttach res;

    struct Marked {
        const NonGeoPrimitive* sym;
        std::vector<std::string> objs;  // triple for angle marks, single id otherwise
    };
    std::map<SymbolClass, std::vector<Marked>> groups;

    for (const auto& s : prims.symbols) {
        Vec2 c = nongeo_center(s);

        if (s.symbol_class == SymbolClass::Perpendicular) {
            bool done = false;
            for (const GeoPrimitive* vp : points_by_distance(prims, c, cfg.tol.symbol_radius)) {
                Vec2 v = vp->as_point().xy();
                std::vector<const GeoPrimitive*> through;
                for (const auto& l : prims.lines)
                    if (dist_point_line(v, l.as_line()) <= cfg.tol.on_line) through.push_back(&l);
                const GeoPrimitive *b1 = nullptr, *b2 = nullptr;
                double best = cfg.tol.perp_angle_deg + 1e-9;
                for (std::size_t i = 0; i < through.size(); ++i)
                    for (std::size_t j = i + 1; j < through.size(); ++j) {
                        double off = std::abs(
                            segment_angle_deg(through[i]->as_line(), through[j]->as_line()) - 90.0);
                        if (off < best) {
                            best = off;
                            b1 = through[i];
                            b2 = through[j];
                        }
                    }
                if (b1) {
                    std::string o1 = std::min(b1->id, b2->id), o2 = std::max(b1->id, b2->id);
                    res.relations.push_back({s.id, {o1, o2}, RelType::Perpendicular});
                    done = true;
                    break;
                }
            }
            if (!done) res.unattached.push_back(s.id + ": no right-angle corner in reach");
            continue;
        }

        if (is_angle_mark(s.symbol_class)) {
            std::optional<WedgeCand> pick;
            for (const GeoPrimitive* vp : points_by_distance(prims, c, cfg.tol.symbol_radius)) {
                Vec2 v = vp->as_point().xy();
                for (const auto& w : wedges_at(prims, vp->id, v, c, cfg)) {
                    if (w.dev > w.wedge_ang / 2 + deg2rad(cfg.angle_arm_tol_deg)) continue;
                    pick = w;
                    break;
                }
                if (pick) break;
            }
            if (pick) {
                groups[s.symbol_class].push_back(
                    {&s, {pick->triple[0], pick->triple[1], pick->triple[2]}});
                res.wedges.push_back({s.id, pick->triple[0], pick->triple[1], pick->triple[2]});
            } else {
                res.unattached.push_back(s.id + ": no angle wedge in reach");
            }
            continue;
        }

        if (is_bar_mark(s.symbol_class)) {
            const GeoPrimitive* best = nullptr;
            double bd = cfg.tol.symbol_radius + 1e-9;
            auto consider = [&](const GeoPrimitive& g) {
                auto m = span_midpoint(g, prims);
                if (!m) return;
                double d = c.dist(*m);
                if (d < bd - 1e-9 || (std::abs(d - bd) <= 1e-9 && best && g.id < best->id)) {
                    bd = d;
                    best = &g;
                }
            };
            for (const auto& l : prims.lines) consider(l);
            for (const auto& ci : prims.circles) consider(ci);
            if (best)
                groups[s.symbol_class].push_back({&s, {best->id}});
            else
                res.unattached.push_back(s.id + ": no line or arc midpoint in reach");
            continue;
        }

        if (is_parallel_mark(s.symbol_class)) {
            const GeoPrimitive* best = nullptr;
            double bd = cfg.tol.symbol_radius + 1e-9;
            for (const auto& l : prims.lines) {
                double d = dist_point_line(c, l.as_line());
                if (d < bd - 1e-9 || (std::abs(d - bd) <= 1e-9 && best && l.id < best->id)) {
                    bd = d;
                    best = &l;
                }
            }
            if (best)
                groups[s.symbol_class].push_back({&s, {best->id}});
            else
                res.unattached.push_back(s.id + ": no line in reach");
            continue;
        }

        // heads pair with texts in arrow indication, unknown marks never attach
        if (!is_head(s.symbol_class))
            res.unattached.push_back(s.id + ": unclassifiable mark");
    }

    // equality grouping per sub-class
    for (auto& [cls, marks] : groups) {
        if (marks.size() < 2) {
            for (const auto& m : marks)
                res.unattached.push_back(m.sym->id + ": no partner with the same mark");
            continue;
        }
        const NonGeoPrimitive* subject = marks.front().sym;
        for (const auto& m : marks) {
            Vec2 a = nongeo_center(*m.sym), b = nongeo_center(*subject);
            if (a.y < b.y || (a.y == b.y && a.x < b.x) ||
                (a.y == b.y && a.x == b.x && m.sym->id < subject->id))
                subject = m.sym;
        }
        if (is_angle_mark(cls)) {
            std::set<std::vector<std::string>> triples;
            for (const auto& m : marks) triples.insert(m.objs);
            if (triples.size() < 2) {
                for (const auto& m : marks)
                    res.unattached.push_back(m.sym->id + ": marks coincide on one wedge");
                continue;
            }
            Relation rel{subject->id, {}, RelType::AngleEquality};
            for (const auto& t : triples) rel.objects.insert(rel.objects.end(), t.begin(), t.end());
            res.relations.push_back(std::move(rel));
        } else {
            std::set<std::string> objs;
            for (const auto& m : marks) objs.insert(m.objs[0]);
            if (objs.size() < 2) {
                for (const auto& m : marks)
                    res.unattached.push_back(m.sym->id + ": marks coincide on one target");
                continue;
            }
            Relation rel{subject->id,
                         {objs.begin(), objs.end()},
                         is_bar_mark(cls) ? RelType::BarEquality : RelType::ParallelEquality};
            res.relations.push_back(std::move(rel));
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

void classify_text(PrimitiveSet& prims, const RuleConfig& cfg) {
    const std::string degree_sign = "\xC2\xB0";
    for (auto& t : prims.texts) {
        const std::string& c = t.content;
        if (c.find(degree_sign) != std::string::npos) {
            t.text_class = TextClass::Degree;
            continue;
        }
        if (c.find("area") != std::string::npos) {
            t.text_class = TextClass::Area;
            continue;
        }
        if (c.size() == 1 && c[0] >= 'A' && c[0] <= 'Z') {
            t.text_class = TextClass::Point;
            continue;
        }
        bool line_label = !c.empty() && std::string("lmnpq").find(c[0]) != std::string::npos &&
                          (c.size() == 1 || (c.size() == 2 && std::isdigit(c[1])));
        if (line_label) {
            t.text_class = TextClass::Line;
            continue;
        }

        bool numeric = !c.empty() && std::all_of(c.begin(), c.end(),
                                                  [](char ch) { return std::isdigit(ch); });
        bool small_var = c.size() == 1 && std::string("xyz").find(c[0]) != std::string::npos;
        if (!numeric && !small_var) {
            t.text_class = TextClass::Unknown;
            continue;
        }

        // numeric-looking: decide among degree / len / angle-label / area by
        // the nearest supporting structure
        Vec2 anchor = nongeo_center(t);
        double d_deg = 1e300, d_len = 1e300, d_ang = 1e300, d_area = 1e300;
        for (const auto& p : prims.points) {
            int through = 0;
            for (const auto& l : prims.lines)
                if (dist_point_line(p.as_point().xy(), l.as_line()) <= cfg.tol.on_line) ++through;
            if (through >= 2) d_deg = std::min(d_deg, anchor.dist(p.as_point().xy()));
        }
        for (const auto& l : prims.lines) d_len = std::min(d_len, anchor.dist(l.as_line().midpoint()));
        for (const auto& ci : prims.circles) {
            auto m = span_midpoint(ci, prims);
            if (m) d_len = std::min(d_len, anchor.dist(*m));
            double dc = anchor.dist(ci.as_circle().center());
            if (dc < ci.as_circle().r - 2.0) d_area = std::min(d_area, dc);
        }
        for (const auto& s : prims.symbols) {
            if (is_angle_mark(s.symbol_class))
                d_ang = std::min(d_ang, anchor.dist(nongeo_center(s)));
            if (s.symbol_class == SymbolClass::HeadLen)
                d_len = std::min(d_len, box_gap(t.box, s.box));
        }

        struct Cand {
            double d;
            int prio;
            TextClass cls;
        };
        std::vector<Cand> cands;
        if (d_deg <= cfg.tol.text_radius) cands.push_back({d_deg, 0, TextClass::Degree});
        if (d_len <= cfg.tol.text_radius) cands.push_back({d_len, 1, TextClass::Len});
        if (d_ang <= cfg.tol.text_radius) cands.push_back({d_ang, 2, TextClass::Angle});
        if (d_area < 1e300) cands.push_back({d_area, 5, TextClass::Area});
        if (cands.empty()) {
            t.text_class = TextClass::Unknown;
            continue;
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.d != b.d) return a.d < b.d;
            return a.prio < b.prio;
        });
        t.text_class = cands.front().cls;
    }
}

// ---------------------------------------------------------------------------

TextAttach attach_text(const PrimitiveSet& prims, const std::vector<WedgeRef>& wedges,
                       const RuleConfig& cfg) {
    TextAttach res;

    // arrow pairing first: nearest qualifying text per head, one head per text
    struct ArrowCand {
        double gap;
        const NonGeoPrimitive* head;
        const NonGeoPrimitive* text;
        HeadTarget hit;
    };
    std::vector<ArrowCand> arrow_cands;
    for (const auto& s : prims.symbols) {
        if (!is_head(s.symbol_class)) continue;
        for (const auto& t : prims.texts) {
            double gap = box_gap(t.box, s.box);
            if (gap > cfg.tol.union_gap) continue;
            auto hit = head_target(prims, nongeo_center(s),
                                    nongeo_center(s) - nongeo_center(t), cfg);
            if (!hit) continue;  // a head that indicates nothing is not an arrow
            arrow_cands.push_back({gap, &s, &t, *hit});
        }
    }
    std::sort(arrow_cands.begin(), arrow_cands.end(), [](const ArrowCand& a, const ArrowCand& b) {
        if (a.gap != b.gap) return a.gap < b.gap;
        if (a.head->id != b.head->id) return a.head->id < b.head->id;
        return a.text->id < b.text->id;
    });
    std::set<std::string> used_heads, used_texts;
    std::map<std::string, ArrowCand> arrow_of;  // text id -> its arrow
    for (const auto& ac : arrow_cands) {
        if (used_heads.count(ac.head->id) || used_texts.count(ac.text->id)) continue;
        used_heads.insert(ac.head->id);
        used_texts.insert(ac.text->id);
        arrow_of.emplace(ac.text->id, ac);
        res.relations.push_back({ac.text->id, {ac.head->id}, RelType::ArrowIndication});
    }
    for (const auto& s : prims.symbols)
        if (is_head(s.symbol_class) && !used_heads.count(s.id))
            res.unattached.push_back(s.id + ": head without a paired text");

    for (const auto& t : prims.texts) {
        auto ait = arrow_of.find(t.id);
        bool arrowed = ait != arrow_of.end();
        Vec2 anchor = arrowed ? ait->second.hit.at : nongeo_center(t);
        double radius = arrowed ? cfg.tol.symbol_radius : cfg.tol.text_radius;

        auto miss = [&](const std::string& why) { res.unattached.push_back(t.id + ": " + why); };

        switch (t.text_class) {
            case TextClass::Point: {
                auto pts = points_by_distance(prims, anchor, radius);
                if (arrowed && ait->second.hit.cls == GeoClass::Point) {
                    res.relations.push_back({t.id, {ait->second.hit.id}, RelType::Text2Point});
                } else if (!pts.empty()) {
                    res.relations.push_back({t.id, {pts.front()->id}, RelType::Text2Point});
                } else {
                    miss("no point in reach");
                }
                break;
            }
            case TextClass::Line: {
                if (arrowed && ait->second.hit.cls == GeoClass::Line) {
                    res.relations.push_back({t.id, {ait->second.hit.id}, RelType::Text2Line});
                    break;
                }
                const GeoPrimitive* best = nullptr;
                double bd = radius + 1e-9;
                for (const auto& l : prims.lines) {
                    double d = dist_point_line(anchor, l.as_line());
                    if (d < bd - 1e-9) {
                        bd = d;
                        best = &l;
                    }
                }
                if (best)
                    res.relations.push_back({t.id, {best->id}, RelType::Text2Line});
                else
                    miss("no line in reach");
                break;
            }
            case TextClass::Len: {
                const GeoPrimitive* best = nullptr;
                if (arrowed && (ait->second.hit.cls == GeoClass::Line ||
                                ait->second.hit.cls == GeoClass::Circle)) {
                    const GeoPrimitive* hit = prims.find_geo(ait->second.hit.id);
                    if (hit && (hit->cls == GeoClass::Line ||
                                hit->circle_style == CircleStyle::Arc))
                        best = hit;
                }
                if (!best) {
                    double bd = radius + 1e-9;
                    auto consider = [&](const GeoPrimitive& g) {
                        auto m = span_midpoint(g, prims);
                        if (!m) return;
                        double d = anchor.dist(*m);
                        if (d < bd - 1e-9) {
                            bd = d;
                            best = &g;
                        }
                    };
                    for (const auto& l : prims.lines) consider(l);
                    for (const auto& ci : prims.circles) consider(ci);
                }
                if (best)
                    res.relations.push_back({t.id, {best->id}, RelType::Text2Len});
                else
                    miss("no measured span in reach");
                break;
            }
            case TextClass::Degree: {
                // wedge containment first, nearest vertex otherwise, arc as
                // the fallback when it is closer than any usable vertex
                std::optional<std::array<std::string, 3>> triple;
                double vertex_dist = 1e300;
                for (const GeoPrimitive* vp : points_by_distance(prims, anchor, radius)) {
                    auto ws = wedges_at(prims, vp->id, vp->as_point().xy(), anchor, cfg);
                    if (ws.empty()) continue;
                    const WedgeCand* use = nullptr;
                    for (const auto& w : ws)
                        if (w.contains) {
                            use = &w;
                            break;
                        }
                    if (!use && !triple) use = &ws.front();  // nearest vertex fallback
                    if (use) {
                        triple = use->triple;
                        vertex_dist = vp->as_point().xy().dist(anchor);
                        if (std::any_of(ws.begin(), ws.end(),
                                        [](const WedgeCand& w) { return w.contains; }))
                            break;  // containing wedge at the nearest such vertex wins
                    }
                }
                const GeoPrimitive* arc = nullptr;
                double arc_dist = 1e300;
                for (const auto& ci : prims.circles) {
                    if (ci.circle_style != CircleStyle::Arc) continue;
                    double d = dist_point_circle(anchor, ci.as_circle());
                    if (d < arc_dist) {
                        arc_dist = d;
                        arc = &ci;
                    }
                }
                if (triple && vertex_dist <= std::min(arc_dist, radius)) {
                    res.relations.push_back(
                        {t.id, {(*triple)[0], (*triple)[1], (*triple)[2]}, RelType::Text2Degree});
                } else if (arc && arc_dist <= radius) {
                    res.relations.push_back({t.id, {arc->id}, RelType::Text2Degree});
                } else {
                    miss("no angle or arc in reach");
                }
                break;
            }
            case TextClass::Angle: {
                // label of a marked angle: adopt the wedge of the nearest mark
                const WedgeRef* best = nullptr;
                double bd = radius + 1e-9;
                for (const auto& w : wedges) {
                    const auto* sym = prims.find_nongeo(w.symbol);
                    if (!sym) continue;
                    double d = anchor.dist(nongeo_center(*sym));
                    if (d < bd - 1e-9) {
                        bd = d;
                        best = &w;
                    }
                }
                if (best) {
                    res.relations.push_back(
                        {t.id, {best->a, best->vertex, best->b}, RelType::Text2Angle});
                    break;
                }
                // no mark: nearest containing wedge, as for degree texts
                std::optional<std::array<std::string, 3>> triple;
                for (const GeoPrimitive* vp : points_by_distance(prims, anchor, radius)) {
                    auto ws = wedges_at(prims, vp->id, vp->as_point().xy(), anchor, cfg);
                    for (const auto& w : ws)
                        if (w.contains) {
                            triple = w.triple;
                            break;
                        }
                    if (triple) break;
                }
                if (triple)
                    res.relations.push_back(
                        {t.id, {(*triple)[0], (*triple)[1], (*triple)[2]}, RelType::Text2Angle});
                else
                    miss("no angle in reach");
                break;
            }
            case TextClass::Area: {
                const GeoPrimitive* best = nullptr;
                double bd = 1e300;
                for (const auto& ci : prims.circles) {
                    double d = anchor.dist(ci.as_circle().center());
                    if (d < ci.as_circle().r && d < bd) {
                        bd = d;
                        best = &ci;
                    }
                }
                if (best)
                    res.relations.push_back({t.id, {best->id}, RelType::Text2Area});
                else
                    miss("not inside any circle");
                break;
            }
            case TextClass::Unknown:
                miss("unclassified");
                break;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

RelateResult parse_relations(PrimitiveSet& prims, const RuleConfig& cfg) {
    RelateResult out;
    auto graph = build_candidate_graph(prims, cfg);
    auto geo = parse_geo2geo(prims, graph, cfg);
    out.relations.insert(out.relations.end(), geo.begin(), geo.end());

    auto sym = attach_symbols(prims, cfg);
    out.relations.insert(out.relations.end(), sym.relations.begin(), sym.relations.end());
    out.diagnostics.insert(out.diagnostics.end(), sym.unattached.begin(), sym.unattached.end());

    classify_text(prims, cfg);
    auto txt = attach_text(prims, sym.wedges, cfg);
    out.relations.insert(out.relations.end(), txt.relations.begin(), txt.relations.end());
    out.diagnostics.insert(out.diagnostics.end(), txt.unattached.begin(), txt.unattached.end());

    // admissibility is re-checked on everything we are about to report
    std::vector<Relation> kept;
    for (auto& rel : out.relations) {
        std::string why;
        if (relation_geometry_ok(rel, prims, cfg.tol, &why)) {
            kept.push_back(std::move(rel));
        } else {
            log_warn("dropping relation " + rel.key() + ": " + why);
            out.diagnostics.push_back(rel.subject + ": " + why);
        }
    }
    out.relations = std::move(kept);
    sort_relations(out.relations);
    return out;
}

}  // namespace geodiag
