#include "geodiag/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "geodiag/extract.hpp"
#include "geodiag/formalang.hpp"
#include "geodiag/glyphs.hpp"
#include "geodiag/log.hpp"
#include "geodiag/raster.hpp"
#include "geodiag/relate.hpp"

namespace geodiag {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

Vec2 dirv(double ang) { return {std::cos(ang), std::sin(ang)}; }

double ccw(double from, double to) {
    double d = std::fmod(to - from, 2 * kPi);
    if (d < 0) d += 2 * kPi;
    return d;
}

// engine output mapped to ranges directly so results do not depend on the
// standard library's distribution implementations
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double uni(double a, double b) { return a + (b - a) * ((eng() >> 11) * 0x1.0p-53); }
    int uniint(int a, int b) {
        return a + static_cast<int>(eng() % static_cast<std::uint64_t>(b - a + 1));
    }
    bool bern(double p) { return uni(0.0, 1.0) < p; }
    double sign() { return bern(0.5) ? 1.0 : -1.0; }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[static_cast<std::size_t>(uniint(0, static_cast<int>(i) - 1))]);
    }
};

// ---------------------------------------------------------------------------
// Structure placement.

struct CircleSpec {
    CirclePos pos;
    bool arc = false;
    double a0 = 0.0;
    double span = 2 * kPi;
    bool want_dot = false;

    Vec2 ring(double ang) const { return pos.center() + dirv(ang) * pos.r; }
    Vec2 e0() const { return ring(a0); }
    Vec2 e1() const { return ring(a0 + span); }
    // clearly inside / clearly outside the drawn span, with an angular pad
    bool ang_inside(double ang, double pad) const {
        if (!arc) return true;
        double off = ccw(a0, ang);
        return off >= pad && off <= span - pad;
    }
    bool ang_outside(double ang, double pad) const {
        if (!arc) return false;
        double off = ccw(a0, ang);
        return off >= span + pad && off <= 2 * kPi - pad;
    }
};

struct Build {
    std::vector<FittedSegment> segs;
    std::vector<CircleSpec> circles;
    std::vector<Vec2> free_dots;
};

double seg_min_dist(const LinePos& a, const LinePos& b) {
    auto x = line_line_intersection(a, b);
    if (x) {
        double ta = (*x - a.a()).dot(a.dir());
        double tb = (*x - b.a()).dot(b.dir());
        if (ta >= 0 && ta <= a.length() && tb >= 0 && tb <= b.length()) return 0.0;
    }
    double d = dist_point_line(a.a(), b);
    d = std::min(d, dist_point_line(a.b(), b));
    d = std::min(d, dist_point_line(b.a(), a));
    d = std::min(d, dist_point_line(b.b(), a));
    return d;
}

// crossing parameter zones: a junction must land on the segment (or touch an
// end) or stay clearly away from the analytic extension window
bool t_zone_ok(double t, double len) {
    if (t >= -0.9 && t <= len + 0.9) return true;
    return t <= -8.0 || t >= len + 8.0;
}

struct Region {
    double x0, y0, x1, y1;
    bool has(const Vec2& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

bool accept_line(const LinePos& cand, const Build& b, const SceneConfig& cfg, const Region& reg,
                 std::vector<Vec2>& new_pts) {
    new_pts.clear();
    if (!reg.has(cand.a()) || !reg.has(cand.b())) return false;
    double len = cand.length();
    if (len < 35.0) return false;
    Vec2 u = cand.dir();

    for (const auto& s : b.segs) {
        const LinePos& o = s.pos;
        double ang = segment_angle_deg(cand, o);
        if (ang < 15.0) {
            if (seg_min_dist(cand, o) < std::max(10.0, cfg.min_separation + cfg.stroke_width + 2))
                return false;
            continue;
        }
        auto x = line_line_intersection(cand, o);
        if (!x) continue;
        double tc = (*x - cand.a()).dot(u);
        double to = (*x - o.a()).dot(o.dir());
        if (!t_zone_ok(tc, len) || !t_zone_ok(to, o.length())) return false;
        bool on_c = tc >= -0.9 && tc <= len + 0.9;
        bool on_o = to >= -0.9 && to <= o.length() + 0.9;
        if (on_c && on_o) new_pts.push_back(*x);
        // endpoints must touch exactly or stay clear
        for (Vec2 e : {cand.a(), cand.b()}) {
            double d = dist_point_line(e, o);
            if (d > 0.5 && d < 8.0) return false;
        }
        for (Vec2 e : {o.a(), o.b()}) {
            double d = dist_point_line(e, cand);
            if (d > 0.5 && d < 8.0) return false;
        }
    }

    for (const auto& c : b.circles) {
        Vec2 ctr = c.pos.center();
        // distance from the center to the segment decides radius/diameter touches
        double tctr = std::clamp((ctr - cand.a()).dot(u), 0.0, len);
        double dctr = ctr.dist(cand.a() + u * tctr);
        if (dctr > 1e-6 && dctr < 8.0) {
            // not through the center: forbid the ambiguous near-tangent window
            double feet = std::abs(dctr - c.pos.r);
            (void)feet;
        }
        for (Vec2 e : {cand.a(), cand.b()}) {
            double dc = e.dist(ctr);
            if (dc > 0.5 && dc < 8.0) return false;            // near-center endpoint
            double dr = std::abs(dc - c.pos.r);
            if (dr > 0.5 && dr < 8.0) return false;            // near-ring endpoint
        }
        auto xs = line_circle_intersections(cand, c.pos);
        double foot_d = std::abs(dctr - c.pos.r);
        if (foot_d > 1e-6 && foot_d < 5.0 && xs.size() != 2) return false;  // grazing
        for (const Vec2& x : xs) {
            double t = (x - cand.a()).dot(u);
            if (!t_zone_ok(t, len)) return false;
            bool on_seg = t >= -0.9 && t <= len + 0.9;
            double ang = std::atan2(x.y - c.pos.y, x.x - c.pos.x);
            if (c.arc && !c.ang_inside(ang, deg2rad(6)) && !c.ang_outside(ang, deg2rad(6)))
                return false;  // crossing hugs an arc end
            if (on_seg && c.ang_inside(ang, 0.0)) new_pts.push_back(x);
        }
        if (xs.size() == 1 || (foot_d <= 1e-6 && dctr >= c.pos.r - 1e-6)) {
            // tangency: keep the foot well inside the segment and the span
            Vec2 foot = cand.a() + u * std::clamp((ctr - cand.a()).dot(u), 0.0, len);
            double t = (foot - cand.a()).dot(u);
            if (t < 6.0 || t > len - 6.0) return false;
            double ang = std::atan2(foot.y - c.pos.y, foot.x - c.pos.x);
            if (c.arc && !c.ang_inside(ang, deg2rad(8))) return false;
            new_pts.push_back(foot);
        }
    }
    return true;
}

// prospective junction spacing guard, cheap version of the full validator
bool pts_spaced(const std::vector<Vec2>& cache, const std::vector<Vec2>& fresh, double min_sep) {
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        for (std::size_t j = i + 1; j < fresh.size(); ++j)
            if (fresh[i].dist(fresh[j]) > 0.5 && fresh[i].dist(fresh[j]) < min_sep) return false;
        for (const auto& q : cache)
            if (fresh[i].dist(q) > 0.5 && fresh[i].dist(q) < min_sep) return false;
    }
    return true;
}

LinePos from_to(const Vec2& a, const Vec2& b) { return {a.x, a.y, b.x, b.y}; }

bool place_circles(Build& b, const SceneConfig& cfg, Rng& rng, int n, const Region& reg,
                   std::vector<Vec2>& cache) {
    for (int ci = 0; ci < n; ++ci) {
        bool done = false;
        for (int attempt = 0; attempt < 60 && !done; ++attempt) {
            double r = rng.uni(30.0, 80.0);
            Vec2 ctr;
            bool tangent_mode = !b.circles.empty() && rng.bern(0.15);
            if (tangent_mode) {
                const CircleSpec& o = b.circles[static_cast<std::size_t>(
                    rng.uniint(0, static_cast<int>(b.circles.size()) - 1))];
                ctr = o.pos.center() + dirv(rng.uni(0, 2 * kPi)) * (o.pos.r + r);
            } else {
                ctr = {rng.uni(reg.x0 + r, reg.x1 - r), rng.uni(reg.y0 + r, reg.y1 - r)};
            }
            if (ctr.x - r < reg.x0 || ctr.x + r > reg.x1 || ctr.y - r < reg.y0 ||
                ctr.y + r > reg.y1)
                continue;

            CircleSpec spec;
            spec.pos = {ctr.x, ctr.y, r};
            if (rng.bern(cfg.w_arc)) {
                spec.arc = true;
                double span_deg = rng.bern(0.5) ? rng.uni(100, 168) : rng.uni(192, 338);
                spec.span = deg2rad(span_deg);
                spec.a0 = rng.uni(0, 2 * kPi);
            }
            spec.want_dot = rng.bern(cfg.w_center_dot);

            bool ok = true;
            std::vector<Vec2> fresh;
            for (const auto& o : b.circles) {
                double d = ctr.dist(o.pos.center());
                double r2 = o.pos.r;
                bool tangent = std::abs(d - (r + r2)) <= 1e-6;
                bool disjoint = d >= r + r2 + 10.0;
                bool crossing = (r + r2 - d >= 12.0) && (d - std::abs(r - r2) >= 12.0);
                bool contained = d + r <= r2 - 10.0 || d + r2 <= r - 10.0;
                if (!(tangent || disjoint || crossing || contained)) {
                    ok = false;
                    break;
                }
                if (tangent) fresh.push_back(ctr + (o.pos.center() - ctr) * (r / d));
                if (crossing) {
                    // both crossing angles must be decisive for both spans
                    double a = (r * r - r2 * r2 + d * d) / (2 * d);
                    double h2 = r * r - a * a;
                    if (h2 <= 0) {
                        ok = false;
                        break;
                    }
                    Vec2 mid = ctr + (o.pos.center() - ctr) * (a / d);
                    Vec2 perp = (o.pos.center() - ctr).normalized().perp() * std::sqrt(h2);
                    for (Vec2 x : {mid + perp, mid - perp}) {
                        double ang_n = std::atan2(x.y - ctr.y, x.x - ctr.x);
                        double ang_o = std::atan2(x.y - o.pos.y, x.x - o.pos.x);
                        if ((spec.arc && !spec.ang_inside(ang_n, deg2rad(6)) &&
                             !spec.ang_outside(ang_n, deg2rad(6))) ||
                            (o.arc && !o.ang_inside(ang_o, deg2rad(6)) &&
                             !o.ang_outside(ang_o, deg2rad(6)))) {
                            ok = false;
                            break;
                        }
                        if (spec.ang_inside(ang_n, 0.0) && o.ang_inside(ang_o, 0.0))
                            fresh.push_back(x);
                    }
                }
                if (!ok) break;
            }
            if (!ok) continue;
            if (spec.arc) {
                fresh.push_back(spec.e0());
                fresh.push_back(spec.e1());
            }
            if (!pts_spaced(cache, fresh, std::max(cfg.min_separation, 6.0))) continue;

            b.circles.push_back(spec);
            for (const auto& q : fresh) cache.push_back(q);
            done = true;
        }
        if (!done) return false;
    }
    return true;
}

bool place_lines(Build& b, const SceneConfig& cfg, Rng& rng, int n, const Region& reg,
                 std::vector<Vec2>& cache) {
    for (int li = 0; li < n; ++li) {
        bool done = false;
        for (int attempt = 0; attempt < 80 && !done; ++attempt) {
            std::vector<int> strategies{0};
            if (!b.segs.empty()) {
                strategies.push_back(1);
                strategies.push_back(2);
                strategies.push_back(3);
            }
            if (!b.circles.empty()) {
                strategies.push_back(4);
                strategies.push_back(5);
                strategies.push_back(6);
            }
            int strat = strategies[static_cast<std::size_t>(
                rng.uniint(0, static_cast<int>(strategies.size()) - 1))];

            LinePos cand{};
            bool built = false;
            switch (strat) {
                case 0: {  // free chord of the region
                    Vec2 p1{rng.uni(reg.x0, reg.x1), rng.uni(reg.y0, reg.y1)};
                    Vec2 d = dirv(rng.uni(0, 2 * kPi));
                    double len = rng.uni(70, 340);
                    Vec2 p2 = p1 + d * len;
                    cand = from_to(p1, p2);
                    built = true;
                    break;
                }
                case 1: {  // anchored on an existing line
                    const LinePos& base =
                        b.segs[static_cast<std::size_t>(
                                   rng.uniint(0, static_cast<int>(b.segs.size()) - 1))]
                            .pos;
                    Vec2 a = base.a() + base.dir() * (rng.uni(0.25, 0.75) * base.length());
                    double rel = rng.uni(deg2rad(20), deg2rad(160)) * rng.sign();
                    double ba = std::atan2(base.dir().y, base.dir().x);
                    Vec2 d = dirv(ba + rel);
                    double l1 = rng.bern(0.45) ? 0.0 : rng.uni(35, 150);
                    double l2 = rng.uni(35, 150);
                    cand = from_to(a - d * l1, a + d * l2);
                    built = true;
                    break;
                }
                case 2: {  // parallel at a safe offset
                    const LinePos& base =
                        b.segs[static_cast<std::size_t>(
                                   rng.uniint(0, static_cast<int>(b.segs.size()) - 1))]
                            .pos;
                    double off = rng.sign() *
                                 rng.uni(std::max(12.0, cfg.min_separation + cfg.stroke_width + 4),
                                         55.0);
                    Vec2 shift = base.dir().perp() * off;
                    double slide = rng.uni(-25, 25);
                    double trim1 = rng.uni(0, 20), trim2 = rng.uni(0, 20);
                    Vec2 p1 = base.a() + shift + base.dir() * (slide + trim1);
                    Vec2 p2 = base.b() + shift + base.dir() * (slide - trim2);
                    cand = from_to(p1, p2);
                    built = true;
                    break;
                }
                case 3: {  // perpendicular through a point on an existing line
                    const LinePos& base =
                        b.segs[static_cast<std::size_t>(
                                   rng.uniint(0, static_cast<int>(b.segs.size()) - 1))]
                            .pos;
                    Vec2 a = base.a() + base.dir() * (rng.uni(0.2, 0.8) * base.length());
                    Vec2 d = base.dir().perp();
                    double l1 = rng.bern(0.5) ? 0.0 : rng.uni(30, 120);
                    double l2 = rng.uni(30, 120);
                    cand = from_to(a - d * l1, a + d * l2);
                    built = true;
                    break;
                }
                case 4: {  // chord with both ends on a ring
                    const CircleSpec& c =
                        b.circles[static_cast<std::size_t>(
                            rng.uniint(0, static_cast<int>(b.circles.size()) - 1))];
                    double pad = deg2rad(10);
                    double lo = c.arc ? c.a0 + pad : 0.0;
                    double width = c.arc ? c.span - 2 * pad : 2 * kPi;
                    if (width < deg2rad(60)) break;
                    double t1 = lo + rng.uni(0, width);
                    double gap = deg2rad(rng.uni(50, 140));
                    if (c.arc && gap > width) break;
                    double t2 = c.arc ? lo + std::fmod(ccw(lo, t1) + gap, width) : t1 + gap;
                    cand = from_to(c.ring(t1), c.ring(t2));
                    built = true;
                    break;
                }
                case 5: {  // radius or diameter
                    const CircleSpec& c =
                        b.circles[static_cast<std::size_t>(
                            rng.uniint(0, static_cast<int>(b.circles.size()) - 1))];
                    double pad = deg2rad(10);
                    double lo = c.arc ? c.a0 + pad : 0.0;
                    double width = c.arc ? c.span - 2 * pad : 2 * kPi;
                    if (width <= 0) break;
                    double th = lo + rng.uni(0, width);
                    bool diameter = rng.bern(0.4) &&
                                    (!c.arc || (c.ang_inside(th, pad) && c.ang_inside(th + kPi, pad)));
                    cand = diameter ? from_to(c.ring(th + kPi), c.ring(th))
                                    : from_to(c.pos.center(), c.ring(th));
                    built = true;
                    break;
                }
                case 6: {  // tangent touching inside the drawn span
                    const CircleSpec& c =
                        b.circles[static_cast<std::size_t>(
                            rng.uniint(0, static_cast<int>(b.circles.size()) - 1))];
                    double pad = deg2rad(12);
                    double lo = c.arc ? c.a0 + pad : 0.0;
                    double width = c.arc ? c.span - 2 * pad : 2 * kPi;
                    if (width <= 0) break;
                    double th = lo + rng.uni(0, width);
                    Vec2 foot = c.ring(th);
                    Vec2 td = dirv(th).perp();
                    cand = from_to(foot - td * rng.uni(30, 90), foot + td * rng.uni(30, 90));
                    built = true;
                    break;
                }
            }
            if (!built) continue;

            std::vector<Vec2> fresh;
            if (!accept_line(cand, b, cfg, reg, fresh)) continue;
            fresh.push_back(cand.a());
            fresh.push_back(cand.b());
            if (!pts_spaced(cache, fresh, std::max(cfg.min_separation, 6.0))) continue;

            FittedSegment seg;
            seg.pos = cand;
            double len = cand.length();
            if (rng.bern(cfg.w_dash) && len >= 60)
                seg.style = LineStyle::Dash;
            else if (rng.bern(cfg.w_mixed) && len >= 80)
                seg.style = LineStyle::Mixed;
            b.segs.push_back(seg);
            for (const auto& q : fresh) cache.push_back(q);
            done = true;
        }
        if (!done) return false;
    }
    return true;
}

void place_free_dots(Build& b, const SceneConfig& cfg, Rng& rng, const Region& reg) {
    if (!rng.bern(cfg.w_free_point)) return;
    int want = 1 + (rng.bern(0.4) ? 1 : 0);
    for (int k = 0; k < want; ++k) {
        for (int attempt = 0; attempt < 30; ++attempt) {
            Vec2 q{rng.uni(reg.x0, reg.x1), rng.uni(reg.y0, reg.y1)};
            bool ok = true;
            for (const auto& s : b.segs)
                if (dist_point_line(q, s.pos) < 16.0) ok = false;
            for (const auto& c : b.circles) {
                if (std::abs(q.dist(c.pos.center()) - c.pos.r) < 16.0) ok = false;
                if (q.dist(c.pos.center()) < 16.0) ok = false;
            }
            for (const auto& d : b.free_dots)
                if (q.dist(d) < 16.0) ok = false;
            if (ok) {
                b.free_dots.push_back(q);
                break;
            }
        }
    }
}

// full margin validation on the derived points, the authoritative gate
bool validate_structure(const Build& b, const std::vector<DerivedPoint>& pts,
                        const SceneConfig& cfg, std::string* why) {
    double sep = std::max(cfg.min_separation, 6.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (pts[i].xy.dist(pts[j].xy) < sep) {
                *why = "derived points closer than the minimum separation";
                return false;
            }
        for (const auto& s : b.segs) {
            double d = dist_point_line(pts[i].xy, s.pos);
            if (d > 0.5 && d < 8.0) {
                *why = "a point sits in the ambiguous band near a line";
                return false;
            }
        }
        for (const auto& c : b.circles) {
            double dr = std::abs(pts[i].xy.dist(c.pos.center()) - c.pos.r);
            if (dr > 0.5 && dr < 8.0) {
                *why = "a point sits in the ambiguous band near a ring";
                return false;
            }
            double dc = pts[i].xy.dist(c.pos.center());
            if (dc > 0.5 && dc < 8.0) {
                *why = "a point sits ambiguously near a circle center";
                return false;
            }
        }
    }
    // dotted ink must stay clear of strokes
    std::vector<Vec2> dots = b.free_dots;
    for (const auto& c : b.circles) {
        bool line_near = false;
        for (const auto& s : b.segs)
            if (dist_point_line(c.pos.center(), s.pos) < 7.0) line_near = true;
        if (c.want_dot && !line_near) dots.push_back(c.pos.center());
    }
    for (const auto& d : dots) {
        for (const auto& s : b.segs)
            if (dist_point_line(d, s.pos) < 7.0) {
                *why = "a dotted point overlaps a stroke";
                return false;
            }
        for (const auto& c : b.circles)
            if (std::abs(d.dist(c.pos.center()) - c.pos.r) < 7.0) {
                *why = "a dotted point overlaps a ring";
                return false;
            }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Decoration: anything placed must win its attachment rule by a margin.

struct InkModel {
    const GroundTruthScene* scene = nullptr;
    double hw = 1.0;
    double dot_r = 2.0;
    struct Span {
        bool arc;
        double a0, span;
    };
    std::vector<Span> spans;
    std::vector<Vec2> dotted;

    void rebuild(const GroundTruthScene& s, double stroke_width, double dot_radius) {
        scene = &s;
        hw = stroke_width / 2.0;
        dot_r = dot_radius;
        spans.clear();
        for (const auto& c : s.prims.circles) {
            Span sp{false, 0.0, 2 * kPi};
            if (c.circle_style == CircleStyle::Arc && !c.arc_endpoints[0].empty()) {
                Vec2 e0 = s.prims.point_xy(c.arc_endpoints[0]);
                Vec2 e1 = s.prims.point_xy(c.arc_endpoints[1]);
                const CirclePos& cp = c.as_circle();
                sp.arc = true;
                sp.a0 = std::atan2(e0.y - cp.y, e0.x - cp.x);
                sp.span = ccw(sp.a0, std::atan2(e1.y - cp.y, e1.x - cp.x));
            }
            spans.push_back(sp);
        }
        dotted.clear();
        for (const auto& p : s.prims.points)
            if (p.point_kind == PointKind::Center || p.point_kind == PointKind::Independent)
                dotted.push_back(p.as_point().xy());
    }

    // distance from q to the nearest drawn ink edge
    double clearance(const Vec2& q) const {
        double best = 1e300;
        for (const auto& l : scene->prims.lines)
            best = std::min(best, dist_point_line(q, l.as_line()) - hw);
        for (std::size_t i = 0; i < scene->prims.circles.size(); ++i) {
            const CirclePos& c = scene->prims.circles[i].as_circle();
            const Span& sp = spans[i];
            double ang = std::atan2(q.y - c.y, q.x - c.x);
            bool drawn = !sp.arc || ccw(sp.a0, ang) <= sp.span + 4.0 / std::max(c.r, 1.0);
            if (drawn) best = std::min(best, std::abs(q.dist(c.center()) - c.r) - hw);
        }
        for (const auto& d : dotted) best = std::min(best, q.dist(d) - dot_r);
        return best;
    }
};

std::vector<Vec2> glyph_ink(const GlyphBitmap& g, const BoxPos& box) {
    std::vector<Vec2> out;
    int ox = static_cast<int>(std::lround(box.x1));
    int oy = static_cast<int>(std::lround(box.y1));
    for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x)
            if (g.at(x, y)) out.push_back({ox + x + 0.5, oy + y + 0.5});
    return out;
}

std::vector<Vec2> text_ink(const std::string& content, const BoxPos& box) {
    std::vector<Vec2> out;
    int ox = static_cast<int>(std::lround(box.x1));
    int oy = static_cast<int>(std::lround(box.y1));
    auto chars = font_split(content);
    for (std::size_t i = 0; i < chars.size(); ++i) {
        auto cols = font_columns(chars[i]);
        for (int cx = 0; cx < kFontW; ++cx)
            for (int cy = 0; cy < kFontH; ++cy)
                if (cols[cx] & (1u << cy))
                    out.push_back({ox + static_cast<int>(i) * kFontPitch + cx + 0.5, oy + cy + 0.5});
    }
    return out;
}

struct RayS {
    Vec2 dir;
    double len;
    std::size_t line_idx;
};

struct Wedge {
    std::string vid;
    Vec2 v;
    Vec2 d1, d2, bis;
    double ang;
    std::size_t l1, l2;
    std::array<std::string, 3> triple;
};

enum class PK { Mark, Head, Text };

struct Decor {
    GroundTruthScene& scene;
    const SceneConfig& cfg;
    Rng& rng;
    InkModel ink;

    struct EqGroup {
        RelType type;
        std::vector<std::string> members;
        std::vector<std::string> objects;
    };
    std::vector<Relation> fixed;
    std::vector<EqGroup> groups;

    std::vector<Wedge> wedges;
    std::vector<std::pair<std::string, Vec2>> wedge_vertices;  // unique, with position
    std::vector<std::pair<std::string, Vec2>> perp_vertices;   // has a 85..95 degree pair
    struct SpanRef {
        std::string id;
        Vec2 mid;
        Vec2 normal;  // unit, for lines either side works; arcs point outward
        bool is_arc;
        double length;
    };
    std::vector<SpanRef> all_spans;

    std::vector<std::pair<int, Wedge>> placed_angle_marks;
    std::set<std::string> named_lines;  // lines already carrying a label text

    std::vector<std::string> upper_pool, line_pool, xyz_pool;
    std::vector<int> degree_pool, len_pool, anglelbl_pool;

    Decor(GroundTruthScene& s, const SceneConfig& c, Rng& r) : scene(s), cfg(c), rng(r) {
        ink.rebuild(s, c.stroke_width, 2.0);
        for (char ch = 'A'; ch <= 'Z'; ++ch) upper_pool.push_back(std::string(1, ch));
        rng.shuffle(upper_pool);
        line_pool = {"l", "m", "n", "p", "q"};
        rng.shuffle(line_pool);
        xyz_pool = {"x", "y", "z"};
        rng.shuffle(xyz_pool);
        for (int v = 20; v <= 160; v += 5) degree_pool.push_back(v);
        rng.shuffle(degree_pool);
        for (int v = 10; v <= 99; ++v) len_pool.push_back(v);
        rng.shuffle(len_pool);
        for (int v = 1; v <= 9; ++v) anglelbl_pool.push_back(v);
        rng.shuffle(anglelbl_pool);
        build_wedges();
        build_spans();
    }

    void build_wedges() {
        const auto& prims = scene.prims;
        for (const auto& p : prims.points) {
            Vec2 v = p.as_point().xy();
            std::vector<RayS> rays;
            for (std::size_t li = 0; li < prims.lines.size(); ++li) {
                const auto& l = prims.lines[li];
                bool incident = l.endpoints[0] == p.id || l.endpoints[1] == p.id;
                for (const auto& q : l.points_on) incident = incident || q == p.id;
                if (!incident) continue;
                const LinePos& s = l.as_line();
                Vec2 u = s.dir();
                double t = (v - s.a()).dot(u);
                if (t >= 26.0) rays.push_back({u * -1.0, t, li});
                if (s.length() - t >= 26.0) rays.push_back({u, s.length() - t, li});
            }
            bool any_wedge = false, any_perpish = false;
            for (std::size_t i = 0; i < rays.size(); ++i)
                for (std::size_t j = i + 1; j < rays.size(); ++j) {
                    double c = std::clamp(rays[i].dir.dot(rays[j].dir), -1.0, 1.0);
                    double ang = std::acos(c);
                    if (std::abs(ang - kPi / 2) <= deg2rad(5.5)) any_perpish = true;
                    if (ang < deg2rad(35) || ang > deg2rad(140)) continue;
                    Vec2 bis = rays[i].dir + rays[j].dir;
                    if (bis.norm() < 1e-9) continue;
                    Wedge w;
                    w.vid = p.id;
                    w.v = v;
                    w.d1 = rays[i].dir;
                    w.d2 = rays[j].dir;
                    w.bis = bis.normalized();
                    w.ang = ang;
                    w.l1 = rays[i].line_idx;
                    w.l2 = rays[j].line_idx;
                    std::vector<NamedPoint> arm1, arm2;
                    for (const auto& q : prims.points) {
                        if (q.id == p.id) continue;
                        Vec2 qx = q.as_point().xy();
                        if (point_on_ray(v, v + w.d1 * 10.0, qx, 3.0)) arm1.push_back({q.id, qx});
                        if (point_on_ray(v, v + w.d2 * 10.0, qx, 3.0)) arm2.push_back({q.id, qx});
                    }
                    if (arm1.empty() || arm2.empty()) continue;
                    w.triple = canonical_angle(w.vid, v, arm1, arm2);
                    wedges.push_back(std::move(w));
                    any_wedge = true;
                }
            if (any_wedge) wedge_vertices.push_back({p.id, v});
            if (any_perpish) perp_vertices.push_back({p.id, v});
        }
    }

    void build_spans() {
        const auto& prims = scene.prims;
        for (const auto& l : prims.lines) {
            const LinePos& s = l.as_line();
            all_spans.push_back({l.id, s.midpoint(), s.dir().perp(), false, s.length()});
        }
        for (std::size_t i = 0; i < prims.circles.size(); ++i) {
            const auto& c = prims.circles[i];
            if (c.circle_style != CircleStyle::Arc) continue;
            const InkModel::Span& sp = ink.spans[i];
            double mid = sp.a0 + sp.span / 2;
            const CirclePos& cp = c.as_circle();
            all_spans.push_back(
                {c.id, cp.center() + dirv(mid) * cp.r, dirv(mid), true, cp.r * sp.span});
        }
    }

    bool in_bounds(const BoxPos& box) const {
        return box.x1 >= 3 && box.y1 >= 3 && box.x2 <= scene.width - 3 &&
               box.y2 <= scene.height - 3;
    }

    bool spacing_ok(const BoxPos& box, PK pk, int paired_sym = -1) const {
        for (std::size_t i = 0; i < scene.prims.symbols.size(); ++i) {
            if (static_cast<int>(i) == paired_sym) continue;
            const auto& s = scene.prims.symbols[i];
            double need = 8.0;
            if (pk == PK::Text && is_head(s.symbol_class)) need = 22.0;
            if (box_gap(box, s.box) < need) return false;
        }
        for (const auto& t : scene.prims.texts) {
            double need = (pk == PK::Head) ? 22.0 : 8.0;
            if (box_gap(box, t.box) < need) return false;
        }
        return true;
    }

    int try_symbol(SymbolClass cls, int rot, const Vec2& center, PK pk, int paired = -1) {
        BoxPos box = glyph_box(cls, rot, center);
        if (!in_bounds(box)) return -1;
        for (const auto& q : glyph_ink(glyph_for(cls, rot), box))
            if (ink.clearance(q) < 2.6) return -1;
        if (!spacing_ok(box, pk, paired)) return -1;
        NonGeoPrimitive s;
        s.id = "S" + std::to_string(scene.prims.symbols.size());
        s.kind = NonGeoPrimitive::Kind::Symbol;
        s.box = box;
        s.symbol_class = cls;
        s.render_rot = rot;
        scene.prims.symbols.push_back(std::move(s));
        return static_cast<int>(scene.prims.symbols.size()) - 1;
    }

    int try_text(const std::string& content, TextClass cls, const Vec2& center, int paired = -1) {
        BoxPos box = text_box(content, center);
        if (!in_bounds(box)) return -1;
        for (const auto& q : text_ink(content, box))
            if (ink.clearance(q) < 2.6) return -1;
        if (!spacing_ok(box, PK::Text, paired)) return -1;
        NonGeoPrimitive t;
        t.id = "T" + std::to_string(scene.prims.texts.size());
        t.kind = NonGeoPrimitive::Kind::Text;
        t.box = box;
        t.symbol_class = SymbolClass::Text;
        t.text_class = cls;
        t.content = content;
        scene.prims.texts.push_back(std::move(t));
        return static_cast<int>(scene.prims.texts.size()) - 1;
    }

    // the target must be the strictly nearest entry of cands to c
    static bool nearest_among(const std::vector<std::pair<std::string, Vec2>>& cands,
                              const Vec2& c, const std::string& want, double adv) {
        double dw = 1e300;
        for (const auto& [id, xy] : cands)
            if (id == want) dw = c.dist(xy);
        for (const auto& [id, xy] : cands)
            if (id != want && c.dist(xy) < dw + adv) return false;
        return true;
    }

    double nearest_vertex_dist(const Vec2& c) const {
        double d = 1e300;
        for (const auto& [id, xy] : wedge_vertices) d = std::min(d, c.dist(xy));
        return d;
    }

    double nearest_mark_dist(const Vec2& c, int skip = -1) const {
        double d = 1e300;
        for (const auto& [idx, w] : placed_angle_marks) {
            if (idx == skip) continue;
            d = std::min(d, c.dist(scene.prims.symbols[static_cast<std::size_t>(idx)].box.center()));
        }
        return d;
    }

    double nearest_span_mid(const Vec2& c, const std::string& skip = "") const {
        double d = 1e300;
        for (const auto& sp : all_spans)
            if (sp.id != skip) d = std::min(d, c.dist(sp.mid));
        return d;
    }

    // numeric texts must not look like they are inside a circle they do not
    // belong to, nor sit closer to a vertex/mark than to their own anchor
    bool numeric_margins(const Vec2& c, double own_d) const {
        for (const auto& ci : scene.prims.circles) {
            const CirclePos& cp = ci.as_circle();
            double dc = c.dist(cp.center());
            if (dc < cp.r - 2.0 && dc < own_d + 4.0) return false;
        }
        return own_d + 4.0 <= nearest_vertex_dist(c) && own_d + 4.0 <= nearest_mark_dist(c);
    }

    void rollback_symbols(std::size_t n) {
        while (scene.prims.symbols.size() > n) scene.prims.symbols.pop_back();
    }
    void rollback_texts(std::size_t n) {
        while (scene.prims.texts.size() > n) scene.prims.texts.pop_back();
    }
};

void family_angle_groups(Decor& D) {
    static const SymbolClass classes[5] = {SymbolClass::Angle, SymbolClass::DoubleAngle,
                                           SymbolClass::TripleAngle, SymbolClass::QuadAngle,
                                           SymbolClass::PentaAngle};
    int ngroups = (D.rng.bern(D.cfg.w_angle) ? 1 : 0) + (D.rng.bern(D.cfg.w_angle * 0.35) ? 1 : 0);
    if (ngroups == 0 || D.wedges.size() < 2) return;
    int base = D.rng.uniint(0, 4);
    std::vector<Wedge> cand = D.wedges;
    D.rng.shuffle(cand);
    std::set<std::string> used_vertices;
    for (int g = 0; g < ngroups; ++g) {
        SymbolClass cls = classes[(base + g) % 5];
        std::size_t need = 2 + (D.rng.bern(0.3) ? 1 : 0);
        std::size_t snapshot = D.scene.prims.symbols.size();
        std::vector<std::pair<int, Wedge>> got;
        for (const auto& w : cand) {
            if (used_vertices.count(w.vid)) continue;
            bool my_own = false;
            for (const auto& [idx, pw] : got) my_own = my_own || pw.vid == w.vid;
            if (my_own) continue;
            for (double d : {13.0, 15.0, 11.0, 17.0}) {
                Vec2 ctr = w.v + w.bis * d;
                if (!Decor::nearest_among(D.wedge_vertices, ctr, w.vid, 3.0)) continue;
                int idx = D.try_symbol(cls, 0, ctr, PK::Mark);
                if (idx >= 0) {
                    got.push_back({idx, w});
                    break;
                }
            }
            if (got.size() == need) break;
        }
        if (got.size() >= 2) {
            std::set<std::array<std::string, 3>> triples;
            Decor::EqGroup grp;
            grp.type = RelType::AngleEquality;
            for (const auto& [idx, w] : got) {
                grp.members.push_back(D.scene.prims.symbols[static_cast<std::size_t>(idx)].id);
                triples.insert(w.triple);
                used_vertices.insert(w.vid);
                D.placed_angle_marks.push_back({idx, w});
            }
            for (const auto& t : triples) grp.objects.insert(grp.objects.end(), t.begin(), t.end());
            D.groups.push_back(std::move(grp));
        } else {
            D.rollback_symbols(snapshot);
        }
    }
}

void family_perp(Decor& D) {
    // a vertex qualifies when every exact right angle there involves the same
    // two lines, so the relation is unambiguous no matter which wedge shows it
    std::map<std::string, std::set<std::pair<std::size_t, std::size_t>>> pairs;
    for (const auto& w : D.wedges)
        if (std::abs(w.ang - kPi / 2) < 1e-4)
            pairs[w.vid].insert({std::min(w.l1, w.l2), std::max(w.l1, w.l2)});
    std::vector<Wedge> cand;
    for (const auto& w : D.wedges)
        if (std::abs(w.ang - kPi / 2) < 1e-4 && pairs[w.vid].size() == 1) cand.push_back(w);
    if (cand.empty()) return;
    int n = (D.rng.bern(D.cfg.w_perp) ? 1 : 0) + (D.rng.bern(D.cfg.w_perp * 0.3) ? 1 : 0);
    D.rng.shuffle(cand);
    std::set<std::string> used;
    for (const auto& w : cand) {
        if (n == 0) break;
        if (used.count(w.vid)) continue;
        for (double d : {13.0, 15.0, 11.0, 17.0}) {
            Vec2 ctr = w.v + w.bis * d;
            if (!Decor::nearest_among(D.perp_vertices, ctr, w.vid, 3.0)) continue;
            int idx = D.try_symbol(SymbolClass::Perpendicular, 0, ctr, PK::Mark);
            if (idx < 0) continue;
            const std::string& a = D.scene.prims.lines[w.l1].id;
            const std::string& b = D.scene.prims.lines[w.l2].id;
            D.fixed.push_back({D.scene.prims.symbols[static_cast<std::size_t>(idx)].id,
                               {std::min(a, b), std::max(a, b)},
                               RelType::Perpendicular});
            used.insert(w.vid);
            --n;
            break;
        }
    }
}

void family_bars(Decor& D) {
    static const SymbolClass classes[4] = {SymbolClass::Bar, SymbolClass::DoubleBar,
                                           SymbolClass::TripleBar, SymbolClass::QuadBar};
    if (D.all_spans.size() < 2) return;
    int ngroups = (D.rng.bern(D.cfg.w_bar) ? 1 : 0) + (D.rng.bern(D.cfg.w_bar * 0.3) ? 1 : 0);
    if (ngroups == 0) return;
    int base = D.rng.uniint(0, 3);
    std::vector<Decor::SpanRef> cand = D.all_spans;
    D.rng.shuffle(cand);
    std::set<std::string> used;
    for (int g = 0; g < ngroups; ++g) {
        SymbolClass cls = classes[(base + g) % 4];
        std::size_t need = 2 + (D.rng.bern(0.3) ? 1 : 0);
        std::size_t snapshot = D.scene.prims.symbols.size();
        std::vector<std::pair<int, std::string>> got;
        for (const auto& sp : cand) {
            if (used.count(sp.id)) continue;
            bool mine = false;
            for (const auto& [i, id] : got) mine = mine || id == sp.id;
            if (mine) continue;
            double sides[2] = {1.0, -1.0};
            if (D.rng.bern(0.5)) std::swap(sides[0], sides[1]);
            int idx = -1;
            for (double d : {10.0, 12.0, 14.0}) {
                for (double side : sides) {
                    if (sp.is_arc && side < 0) continue;  // stay outside the disk
                    Vec2 ctr = sp.mid + sp.normal * (side * d);
                    bool margin = true;
                    for (const auto& o : D.all_spans)
                        if (o.id != sp.id && ctr.dist(o.mid) < d + 4.0) margin = false;
                    if (!margin) continue;
                    idx = D.try_symbol(cls, 0, ctr, PK::Mark);
                    if (idx >= 0) break;
                }
                if (idx >= 0) break;
            }
            if (idx >= 0)
                got.push_back({idx, sp.id});
            if (got.size() == need) break;
        }
        std::set<std::string> objs;
        for (const auto& [i, id] : got) objs.insert(id);
        if (objs.size() >= 2) {
            Decor::EqGroup grp;
            grp.type = RelType::BarEquality;
            for (const auto& [i, id] : got) {
                grp.members.push_back(D.scene.prims.symbols[static_cast<std::size_t>(i)].id);
                used.insert(id);
            }
            grp.objects.assign(objs.begin(), objs.end());
            D.groups.push_back(std::move(grp));
        } else {
            D.rollback_symbols(snapshot);
        }
    }
}

void family_parallels(Decor& D) {
    static const SymbolClass classes[3] = {SymbolClass::Parallel, SymbolClass::DoubleParallel,
                                           SymbolClass::TripleParallel};
    std::vector<std::size_t> lines;
    for (std::size_t i = 0; i < D.scene.prims.lines.size(); ++i)
        if (D.scene.prims.lines[i].as_line().length() >= 110) lines.push_back(i);
    if (lines.size() < 2 || !D.rng.bern(D.cfg.w_parallel)) return;
    SymbolClass cls = classes[D.rng.uniint(0, 2)];
    // favour genuinely parallel pairs when the scene has them
    D.rng.shuffle(lines);
    std::map<std::size_t, int> has_mate;
    for (std::size_t k : lines) {
        has_mate[k] = 1;
        for (std::size_t o : lines)
            if (o != k && segment_angle_deg(D.scene.prims.lines[k].as_line(),
                                            D.scene.prims.lines[o].as_line()) < 1.0)
                has_mate[k] = 0;
    }
    std::stable_sort(lines.begin(), lines.end(),
                     [&](std::size_t a, std::size_t b) { return has_mate[a] < has_mate[b]; });
    std::size_t need = 2 + (D.rng.bern(0.25) ? 1 : 0);
    std::size_t snapshot = D.scene.prims.symbols.size();
    std::vector<std::pair<int, std::string>> got;
    for (std::size_t li : lines) {
        const auto& line = D.scene.prims.lines[li];
        const LinePos& s = line.as_line();
        double len = s.length();
        double off_along = std::max(32.0, 0.22 * len);
        for (double along : {off_along, -off_along}) {
            Vec2 anchor = s.midpoint() + s.dir() * along;
            int idx = -1;
            for (double d : {9.0, 11.0, 13.0}) {
                for (double side : {1.0, -1.0}) {
                    Vec2 ctr = anchor + s.dir().perp() * (side * d);
                    bool margin = true;
                    for (const auto& o : D.scene.prims.lines)
                        if (o.id != line.id && dist_point_line(ctr, o.as_line()) < d + 4.0)
                            margin = false;
                    if (!margin) continue;
                    idx = D.try_symbol(cls, 0, ctr, PK::Mark);
                    if (idx >= 0) break;
                }
                if (idx >= 0) break;
            }
            if (idx >= 0) {
                got.push_back({idx, line.id});
                break;
            }
        }
        if (got.size() == need) break;
    }
    std::set<std::string> objs;
    for (const auto& [i, id] : got) objs.insert(id);
    if (objs.size() >= 2) {
        Decor::EqGroup grp;
        grp.type = RelType::ParallelEquality;
        for (const auto& [i, id] : got)
            grp.members.push_back(D.scene.prims.symbols[static_cast<std::size_t>(i)].id);
        grp.objects.assign(objs.begin(), objs.end());
        D.groups.push_back(std::move(grp));
    } else {
        D.rollback_symbols(snapshot);
    }
}

int best_rot(const Vec2& front_dir) {
    static const Vec2 fronts[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    static const int rots[4] = {0, 90, 180, 270};
    int best = 0;
    double bd = -2;
    for (int i = 0; i < 4; ++i) {
        double d = fronts[i].dot(front_dir);
        if (d > bd) {
            bd = d;
            best = rots[i];
        }
    }
    return best;
}

double box_ext(const BoxPos& box, const Vec2& dir) {
    return box.width() / 2.0 * std::abs(dir.x) + box.height() / 2.0 * std::abs(dir.y);
}

void family_arrows(Decor& D) {
    int n = (D.rng.bern(D.cfg.w_arrow) ? 1 : 0) + (D.rng.bern(D.cfg.w_arrow * 0.35) ? 1 : 0);
    for (int k = 0; k < n; ++k) {
        std::vector<int> kinds;
        for (const auto& p : D.scene.prims.points)
            if (p.point_kind == PointKind::Independent) {
                kinds.push_back(0);
                break;
            }
        if (!D.scene.prims.lines.empty()) {
            kinds.push_back(1);
            kinds.push_back(2);
        }
        for (const auto& sp : D.all_spans)
            if (sp.is_arc) {
                kinds.push_back(3);
                break;
            }
        if (kinds.empty()) return;
        int kind = kinds[static_cast<std::size_t>(
            D.rng.uniint(0, static_cast<int>(kinds.size()) - 1))];

        bool placed = false;
        for (int attempt = 0; attempt < 24 && !placed; ++attempt) {
            std::string target_id;
            Vec2 tip_target{};  // where the arrow should aim
            Vec2 approach{};    // unit, from target toward the head
            std::string content;
            TextClass tcls = TextClass::Unknown;
            SymbolClass head_cls = SymbolClass::Head;
            double head_d = 0;

            if (kind == 0) {
                std::vector<const GeoPrimitive*> frees;
                for (const auto& p : D.scene.prims.points)
                    if (p.point_kind == PointKind::Independent) frees.push_back(&p);
                if (frees.empty()) break;
                const GeoPrimitive* p = frees[static_cast<std::size_t>(
                    D.rng.uniint(0, static_cast<int>(frees.size()) - 1))];
                target_id = p->id;
                tip_target = p->as_point().xy();
                approach = dirv(D.rng.uni(0, 2 * kPi));
                if (D.upper_pool.empty()) break;
                content = D.upper_pool.back();
                tcls = TextClass::Point;
                head_d = D.rng.uni(8, 11);
            } else if (kind == 1 || kind == 2) {
                const auto& line = D.scene.prims.lines[static_cast<std::size_t>(
                    D.rng.uniint(0, static_cast<int>(D.scene.prims.lines.size()) - 1))];
                if (kind == 1 && D.named_lines.count(line.id)) continue;
                const LinePos& s = line.as_line();
                target_id = line.id;
                tip_target = s.a() + s.dir() * (D.rng.uni(0.25, 0.75) * s.length());
                approach = s.dir().perp() * D.rng.sign();
                if (kind == 1) {
                    content = D.line_pool.empty()
                                  ? "q" + std::to_string(D.scene.prims.texts.size())
                                  : D.line_pool.back();
                    tcls = TextClass::Line;
                    head_d = D.rng.uni(8, 10);
                } else {
                    if (D.len_pool.empty()) break;
                    content = std::to_string(D.len_pool.back());
                    tcls = TextClass::Len;
                    head_cls = SymbolClass::HeadLen;
                    head_d = D.rng.uni(7, 9);
                }
            } else {
                std::vector<const Decor::SpanRef*> arcs;
                for (const auto& sp : D.all_spans)
                    if (sp.is_arc) arcs.push_back(&sp);
                const auto* sp = arcs[static_cast<std::size_t>(
                    D.rng.uniint(0, static_cast<int>(arcs.size()) - 1))];
                if (D.len_pool.empty()) break;
                target_id = sp->id;
                tip_target = sp->mid;
                approach = sp->normal;
                content = std::to_string(D.len_pool.back());
                tcls = TextClass::Len;
                head_cls = SymbolClass::HeadLen;
                head_d = D.rng.uni(7, 9);
            }

            Vec2 h_ctr = tip_target + approach * head_d;
            int rot = best_rot(approach * -1.0);
            int h_idx = D.try_symbol(head_cls, rot, h_ctr, PK::Head);
            if (h_idx < 0) continue;
            const BoxPos& h_box = D.scene.prims.symbols[static_cast<std::size_t>(h_idx)].box;

            BoxPos probe = text_box(content, {0, 0});
            double gap = 6.5;
            Vec2 t_ctr = h_ctr + approach * (box_ext(h_box, approach) + gap +
                                             box_ext(probe, approach));
            bool margins = tcls != TextClass::Len || D.numeric_margins(t_ctr, gap);
            int t_idx = margins ? D.try_text(content, tcls, t_ctr, h_idx) : -1;
            if (t_idx < 0) {
                D.rollback_symbols(static_cast<std::size_t>(h_idx));
                continue;
            }

            auto hit = head_target(D.scene.prims, h_ctr, h_ctr - t_ctr);
            if (!hit || hit->id != target_id) {
                D.rollback_texts(static_cast<std::size_t>(t_idx));
                D.rollback_symbols(static_cast<std::size_t>(h_idx));
                continue;
            }

            const std::string& hid = D.scene.prims.symbols[static_cast<std::size_t>(h_idx)].id;
            const std::string& tid = D.scene.prims.texts[static_cast<std::size_t>(t_idx)].id;
            D.fixed.push_back({tid, {hid}, RelType::ArrowIndication});
            if (tcls == TextClass::Point)
                D.fixed.push_back({tid, {target_id}, RelType::Text2Point});
            else if (tcls == TextClass::Line)
                D.fixed.push_back({tid, {target_id}, RelType::Text2Line});
            else
                D.fixed.push_back({tid, {target_id}, RelType::Text2Len});
            if (tcls == TextClass::Point) D.upper_pool.pop_back();
            if (tcls == TextClass::Line) {
                if (!D.line_pool.empty()) D.line_pool.pop_back();
                D.named_lines.insert(target_id);
            }
            if (tcls == TextClass::Len) D.len_pool.pop_back();
            placed = true;
        }
    }
}

void family_point_labels(Decor& D) {
    std::vector<std::size_t> order(D.scene.prims.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    D.rng.shuffle(order);
    int placed = 0;
    std::vector<std::pair<std::string, Vec2>> all_pts;
    for (const auto& p : D.scene.prims.points) all_pts.push_back({p.id, p.as_point().xy()});
    for (std::size_t pi : order) {
        if (placed >= 8 || D.upper_pool.empty()) break;
        if (!D.rng.bern(D.cfg.w_point_label)) continue;
        const auto& p = D.scene.prims.points[pi];
        Vec2 v = p.as_point().xy();
        std::vector<Vec2> dirs;
        for (int a = 0; a < 8; ++a) dirs.push_back(dirv(a * kPi / 4));
        D.rng.shuffle(dirs);
        std::string content = D.upper_pool.back();
        bool done = false;
        for (const Vec2& dir : dirs) {
            for (double d : {11.0, 13.0}) {
                Vec2 ctr = v + dir * d;
                if (!Decor::nearest_among(all_pts, ctr, p.id, 4.0)) continue;
                int idx = D.try_text(content, TextClass::Point, ctr);
                if (idx >= 0) {
                    D.fixed.push_back({D.scene.prims.texts[static_cast<std::size_t>(idx)].id,
                                       {p.id},
                                       RelType::Text2Point});
                    D.upper_pool.pop_back();
                    ++placed;
                    done = true;
                    break;
                }
            }
            if (done) break;
        }
    }
}

void family_line_labels(Decor& D) {
    std::vector<std::size_t> order(D.scene.prims.lines.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    D.rng.shuffle(order);
    int placed = 0;
    for (std::size_t li : order) {
        if (placed >= 4 || D.line_pool.empty()) break;
        const auto& line = D.scene.prims.lines[li];
        if (D.named_lines.count(line.id)) continue;
        if (!D.rng.bern(D.cfg.w_line_label)) continue;
        const LinePos& s = line.as_line();
        std::string content = D.line_pool.back();
        bool done = false;
        for (double t : {0.14, 0.86}) {
            for (double side : {1.0, -1.0}) {
                double d = D.rng.uni(9, 12);
                Vec2 ctr = s.a() + s.dir() * (t * s.length()) + s.dir().perp() * (side * d);
                bool margin = true;
                for (const auto& o : D.scene.prims.lines)
                    if (o.id != line.id && dist_point_line(ctr, o.as_line()) <
                                               dist_point_line(ctr, s) + 4.0)
                        margin = false;
                if (!margin) continue;
                int idx = D.try_text(content, TextClass::Line, ctr);
                if (idx >= 0) {
                    D.fixed.push_back({D.scene.prims.texts[static_cast<std::size_t>(idx)].id,
                                       {line.id},
                                       RelType::Text2Line});
                    D.line_pool.pop_back();
                    D.named_lines.insert(line.id);
                    ++placed;
                    done = true;
                    break;
                }
            }
            if (done) break;
        }
    }
}

void family_degree(Decor& D) {
    // on angle wedges
    std::vector<Wedge> cand = D.wedges;
    D.rng.shuffle(cand);
    std::set<std::string> used_vertices;
    int placed = 0;
    for (const auto& w : cand) {
        if (placed >= 3 || D.degree_pool.empty()) break;
        if (used_vertices.count(w.vid)) continue;
        if (!D.rng.bern(D.cfg.w_degree)) continue;
        for (double d : {21.0, 24.0, 19.0, 26.0}) {
            Vec2 ctr = w.v + w.bis * d;
            if (!Decor::nearest_among(D.wedge_vertices, ctr, w.vid, 4.0)) continue;
            bool arc_clear = true;
            for (std::size_t i = 0; i < D.scene.prims.circles.size(); ++i) {
                const auto& c = D.scene.prims.circles[i];
                if (c.circle_style != CircleStyle::Arc) continue;
                if (dist_point_circle(ctr, c.as_circle()) < d + 4.0) arc_clear = false;
            }
            if (!arc_clear) continue;
            std::string content = std::to_string(D.degree_pool.back()) + "\xC2\xB0";
            int idx = D.try_text(content, TextClass::Degree, ctr);
            if (idx >= 0) {
                D.fixed.push_back({D.scene.prims.texts[static_cast<std::size_t>(idx)].id,
                                   {w.triple[0], w.triple[1], w.triple[2]},
                                   RelType::Text2Degree});
                D.degree_pool.pop_back();
                used_vertices.insert(w.vid);
                ++placed;
                break;
            }
        }
    }
    // on arcs
    int arc_placed = 0;
    for (std::size_t i = 0; i < D.scene.prims.circles.size(); ++i) {
        if (arc_placed >= 2 || D.degree_pool.empty()) break;
        const auto& c = D.scene.prims.circles[i];
        if (c.circle_style != CircleStyle::Arc) continue;
        if (!D.rng.bern(D.cfg.w_degree * 0.6)) continue;
        const InkModel::Span& sp = D.ink.spans[i];
        const CirclePos& cp = c.as_circle();
        for (double frac : {0.5, 0.35, 0.65}) {
            double ang = sp.a0 + sp.span * frac;
            for (double d : {11.0, 13.0}) {
                Vec2 ctr = cp.center() + dirv(ang) * (cp.r + d);
                if (D.nearest_vertex_dist(ctr) < d + 4.0) continue;
                bool other_clear = true;
                for (std::size_t j = 0; j < D.scene.prims.circles.size(); ++j) {
                    if (j == i) continue;
                    const auto& o = D.scene.prims.circles[j];
                    if (o.circle_style == CircleStyle::Arc &&
                        dist_point_circle(ctr, o.as_circle()) < d + 4.0)
                        other_clear = false;
                }
                if (!other_clear) continue;
                std::string content = std::to_string(D.degree_pool.back()) + "\xC2\xB0";
                int idx = D.try_text(content, TextClass::Degree, ctr);
                if (idx >= 0) {
                    D.fixed.push_back({D.scene.prims.texts[static_cast<std::size_t>(idx)].id,
                                       {c.id},
                                       RelType::Text2Degree});
                    D.degree_pool.pop_back();
                    ++arc_placed;
                    break;
                }
            }
            if (arc_placed > 0 && D.rng.bern(0.7)) break;
        }
    }
}

void family_len(Decor& D) {
    std::vector<Decor::SpanRef> cand = D.all_spans;
    D.rng.shuffle(cand);
    int placed = 0;
    std::set<std::string> used;
    for (const auto& sp : cand) {
        if (placed >= 3) break;
        if (used.count(sp.id)) continue;
        if (!D.rng.bern(D.cfg.w_len)) continue;
        std::string content;
        bool from_xyz = !D.xyz_pool.empty() && D.rng.bern(0.25);
        if (from_xyz)
            content = D.xyz_pool.back();
        else if (!D.len_pool.empty())
            content = std::to_string(D.len_pool.back());
        else
            break;
        bool done = false;
        for (double d : {10.0, 12.0, 14.0}) {
            for (double side : {1.0, -1.0}) {
                if (sp.is_arc && side < 0) continue;
                Vec2 ctr = sp.mid + sp.normal * (side * d);
                bool margin = true;
                for (const auto& o : D.all_spans)
                    if (o.id != sp.id && ctr.dist(o.mid) < d + 4.0) margin = false;
                if (!margin || !D.numeric_margins(ctr, d)) continue;
                int idx = D.try_text(content, TextClass::Len, ctr);
                if (idx >= 0) {
                    D.fixed.push_back({D.scene.prims.texts[static_cast<std::size_t>(idx)].id,
                                       {sp.id},
                                       RelType::Text2Len});
                    if (from_xyz)
                        D.xyz_pool.pop_back();
                    else
                        D.len_pool.pop_back();
                    used.insert(sp.id);
                    ++placed;
                    done = true;
                    break;
                }
            }
            if (done) break;
        }
    }
}

void family_area(Decor& D) {
    int placed = 0;
    for (std::size_t i = 0; i < D.scene.prims.circles.size(); ++i) {
        if (placed >= 2) break;
        const auto& c = D.scene.prims.circles[i];
        if (c.circle_style != CircleStyle::Complete) continue;
        if (!D.rng.bern(D.cfg.w_area)) continue;
        const CirclePos& cp = c.as_circle();
        std::string content = placed == 0 ? "area" : "area2";
        for (int attempt = 0; attempt < 6; ++attempt) {
            Vec2 ctr = cp.center() +
                       Vec2{D.rng.uni(-0.12, 0.12) * cp.r, D.rng.uni(-0.12, 0.12) * cp.r};
            double own = ctr.dist(cp.center());
            if (own + 16.0 > cp.r) continue;
            bool margin = true;
            for (std::size_t j = 0; j < D.scene.prims.circles.size(); ++j) {
                if (j == i) continue;
                const CirclePos& o = D.scene.prims.circles[j].as_circle();
                double dj = ctr.dist(o.center());
                if (dj < o.r && dj < own + 4.0) margin = false;
            }
            if (!margin) continue;
            int idx = D.try_text(content, TextClass::Area, ctr);
            if (idx >= 0) {
                D.fixed.push_back({D.scene.prims.texts[static_cast<std::size_t>(idx)].id,
                                   {c.id},
                                   RelType::Text2Area});
                ++placed;
                break;
            }
        }
    }
}

void family_angle_labels(Decor& D) {
    std::vector<std::pair<int, Wedge>> cand = D.placed_angle_marks;
    D.rng.shuffle(cand);
    int placed = 0;
    for (const auto& [sym_idx, w] : cand) {
        if (placed >= 3 || D.anglelbl_pool.empty()) break;
        if (!D.rng.bern(D.cfg.w_angle_label)) continue;
        const BoxPos& mark_box = D.scene.prims.symbols[static_cast<std::size_t>(sym_idx)].box;
        Vec2 mark_ctr = mark_box.center();
        double mark_d = mark_ctr.dist(w.v);
        std::string content = std::to_string(D.anglelbl_pool.back());
        (void)mark_d;
        // hug the mark from a side that keeps the label a separate blob while
        // the vertex stays within labelling reach; axis offsets widen the box
        // gap fastest, the ink check rejects sides that land on an arm
        double sx = w.bis.x >= 0 ? 1.0 : -1.0;
        double sy = w.bis.y >= 0 ? 1.0 : -1.0;
        bool done = false;
        for (Vec2 dirc : {w.bis, Vec2{sx, 0}, Vec2{0, sy}, Vec2{-sx, 0}, Vec2{0, -sy}}) {
            for (double extra = 13.0; extra <= 18.0; extra += 1.0) {
                Vec2 ctr = mark_ctr + dirc * extra;
                if (ctr.dist(w.v) > 28.0) break;
                if (box_gap(text_box(content, ctr), mark_box) < 5.0) continue;
                double own = extra;
                if (D.nearest_mark_dist(ctr, sym_idx) < own + 4.0) continue;
                if (D.nearest_span_mid(ctr) < own + 4.0) continue;
                if (D.nearest_vertex_dist(ctr) < own + 4.0) continue;
                bool in_circle = false;
                for (const auto& c : D.scene.prims.circles) {
                    const CirclePos& cp = c.as_circle();
                    if (ctr.dist(cp.center()) < cp.r - 2.0 && ctr.dist(cp.center()) < own + 4.0)
                        in_circle = true;
                }
                if (in_circle) continue;
                int idx = D.try_text(content, TextClass::Angle, ctr, sym_idx);
                if (idx >= 0) {
                    D.fixed.push_back({D.scene.prims.texts[static_cast<std::size_t>(idx)].id,
                                       {w.triple[0], w.triple[1], w.triple[2]},
                                       RelType::Text2Angle});
                    D.anglelbl_pool.pop_back();
                    ++placed;
                    done = true;
                    break;
                }
            }
            if (done) break;
        }
    }
}

// intended geo2geo relations read straight off the wired slots
void intended_geo2geo(const GroundTruthScene& scene, std::vector<Relation>& out) {
    for (const auto& l : scene.prims.lines)
        for (const auto& pid : l.points_on) out.push_back({pid, {l.id}, RelType::PointOnLine});
    for (const auto& c : scene.prims.circles) {
        for (const auto& pid : c.points_on) out.push_back({pid, {c.id}, RelType::PointOnCircle});
        if (!c.center_point.empty())
            out.push_back({c.center_point, {c.id}, RelType::CenterOfCircle});
    }
}

struct AttemptResult {
    GroundTruthScene scene;
    GrayImage image;
};

std::optional<AttemptResult> try_build(const SceneConfig& cfg, Rng& rng, std::string* why) {
    Region reg{46.0, 46.0, cfg.width - 46.0, cfg.height - 46.0};
    int n_lines = rng.uniint(cfg.min_lines, cfg.max_lines);
    int n_circles = rng.uniint(cfg.min_circles, cfg.max_circles);

    Build b;
    std::vector<Vec2> cache;
    if (!place_circles(b, cfg, rng, n_circles, reg, cache)) {
        *why = "cannot place a circle with the required separation";
        return std::nullopt;
    }
    if (!place_lines(b, cfg, rng, n_lines, reg, cache)) {
        *why = "cannot place a line with the required separation";
        return std::nullopt;
    }
    place_free_dots(b, cfg, rng, reg);

    ExtractionConfig ecfg;
    ecfg.stroke_width = cfg.stroke_width;

    std::vector<FittedCircle> fcircles;
    for (const auto& c : b.circles) {
        FittedCircle f;
        f.pos = c.pos;
        f.arc = c.arc;
        f.arc_e0 = c.e0();
        f.arc_e1 = c.e1();
        fcircles.push_back(f);
    }
    std::vector<Vec2> dots = b.free_dots;
    for (const auto& c : b.circles) {
        if (!c.want_dot) continue;
        bool line_near = false;
        for (const auto& s : b.segs)
            if (dist_point_line(c.pos.center(), s.pos) < 7.0) line_near = true;
        if (!line_near) dots.push_back(c.pos.center());
    }

    std::vector<DerivedPoint> pts = detect_points(b.segs, fcircles, ecfg, dots);
    if (!validate_structure(b, pts, cfg, why)) return std::nullopt;

    GroundTruthScene scene = assemble_geo(b.segs, fcircles, pts, cfg.width, cfg.height, ecfg);

    {
        Decor D(scene, cfg, rng);
        family_angle_groups(D);
        family_perp(D);
        family_bars(D);
        family_parallels(D);
        family_arrows(D);
        family_point_labels(D);
        family_line_labels(D);
        family_degree(D);
        family_len(D);
        family_area(D);
        family_angle_labels(D);

        RasterConfig rc;
        rc.stroke_width = cfg.stroke_width;
        GrayImage img(1, 1);
        try {
            img = rasterize(scene, rc);
        } catch (const std::exception& e) {
            *why = std::string("raster rejected the scene: ") + e.what();
            return std::nullopt;
        }

        // final gate: the relation parser must agree exactly
        std::vector<Relation> intended = D.fixed;
        intended_geo2geo(scene, intended);
        for (const auto& g : D.groups) {
            const NonGeoPrimitive* subj = nullptr;
            for (const auto& mid : g.members) {
                const auto* s = scene.prims.find_nongeo(mid);
                if (!subj) {
                    subj = s;
                    continue;
                }
                Vec2 a = s->box.center(), bc = subj->box.center();
                if (a.y < bc.y || (a.y == bc.y && a.x < bc.x) ||
                    (a.y == bc.y && a.x == bc.x && s->id < subj->id))
                    subj = s;
            }
            intended.push_back({subj->id, g.objects, g.type});
        }

        PrimitiveSet parsed_prims = scene.prims;
        RelateResult rr = parse_relations(parsed_prims, RuleConfig{});
        if (!rr.diagnostics.empty()) {
            *why = "relation parse left a loose end: " + rr.diagnostics.front();
            return std::nullopt;
        }
        std::vector<std::string> want, got;
        for (const auto& r : intended) want.push_back(r.key());
        for (const auto& r : rr.relations) got.push_back(r.key());
        std::sort(want.begin(), want.end());
        std::sort(got.begin(), got.end());
        if (want != got) {
            std::string diff;
            for (const auto& k : got)
                if (!std::binary_search(want.begin(), want.end(), k)) diff = "extra " + k;
            for (const auto& k : want)
                if (!std::binary_search(got.begin(), got.end(), k)) diff = "missing " + k;
            *why = "relation parse disagrees with construction: " + diff;
            return std::nullopt;
        }
        for (std::size_t i = 0; i < scene.prims.texts.size(); ++i)
            if (parsed_prims.texts[i].text_class != scene.prims.texts[i].text_class) {
                *why = "text classification drifted for " + scene.prims.texts[i].id;
                return std::nullopt;
            }

        scene.relations = rr.relations;
        PropositionSet props = generate_propositions(scene.prims, scene.relations);
        scene.propositions.clear();
        for (const auto& p : props.props) scene.propositions.push_back(serialize(p));
        return AttemptResult{std::move(scene), std::move(img)};
    }
}

}  // namespace

// ---------------------------------------------------------------------------

void validate_config(const SceneConfig& cfg) {
    auto bad = [](const std::string& what) { throw std::invalid_argument(what); };
    if (cfg.width < 64 || cfg.width > 4096 || cfg.height < 64 || cfg.height > 4096)
        bad("image size out of range");
    if (cfg.min_lines < 0 || cfg.max_lines < cfg.min_lines || cfg.max_lines > 32)
        bad("line count range invalid");
    if (cfg.min_circles < 0 || cfg.max_circles < cfg.min_circles || cfg.max_circles > 8)
        bad("circle count range invalid");
    if (cfg.stroke_width < 1.0) bad("stroke width must be at least 1");
    if (cfg.min_separation <= cfg.stroke_width)
        bad("min separation must exceed the stroke width");
    for (double w : {cfg.w_perp, cfg.w_angle, cfg.w_bar, cfg.w_parallel, cfg.w_arrow,
                     cfg.w_point_label, cfg.w_line_label, cfg.w_degree, cfg.w_len, cfg.w_area,
                     cfg.w_angle_label, cfg.w_dash, cfg.w_mixed, cfg.w_arc, cfg.w_center_dot,
                     cfg.w_free_point})
        if (w < 0.0 || w > 1.0) bad("family weight out of [0, 1]");
}

std::string config_digest(const SceneConfig& cfg) {
    std::ostringstream os;
    os << cfg.width << '|' << cfg.height << '|' << cfg.min_lines << '|' << cfg.max_lines << '|'
       << cfg.min_circles << '|' << cfg.max_circles << '|' << cfg.stroke_width << '|'
       << cfg.min_separation << '|' << cfg.w_perp << '|' << cfg.w_angle << '|' << cfg.w_bar << '|'
       << cfg.w_parallel << '|' << cfg.w_arrow << '|' << cfg.w_point_label << '|'
       << cfg.w_line_label << '|' << cfg.w_degree << '|' << cfg.w_len << '|' << cfg.w_area << '|'
       << cfg.w_angle_label << '|' << cfg.w_dash << '|' << cfg.w_mixed << '|' << cfg.w_arc << '|'
       << cfg.w_center_dot << '|' << cfg.w_free_point;
    std::string s = os.str();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream hex;
    hex << std::hex;
    for (int i = 15; i >= 0; --i) hex << ((h >> (i * 4)) & 0xF);
    return hex.str();
}

GroundTruthScene sample_scene(const SceneConfig& cfg, std::uint64_t seed, GrayImage* image_out) {
    validate_config(cfg);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::string why = "no attempt made";
    for (int attempt = 0; attempt < 40; ++attempt) {
        auto result = try_build(cfg, rng, &why);
        if (!result) continue;
        result->scene.id = "scene-" + std::to_string(seed);
        result->scene.seed = seed;
        result->scene.config_hash = config_digest(cfg);
        if (image_out) *image_out = std::move(result->image);
        return std::move(result->scene);
    }
    throw SynthError("scene synthesis gave up after 40 attempts: " + why);
}

}  // namespace geodiag
