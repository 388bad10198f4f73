#include "geodiag/extract.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "geodiag/glyphs.hpp"
#include "geodiag/log.hpp"
#include "geodiag/raster.hpp"

namespace geodiag {

namespace {

Vec2 px_center(int x, int y) {
    return {x + 0.5, y + 0.5};
}

constexpr int kNx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

// --- connected components --------------------------------------------------

struct Component {
    std::vector<std::pair<int, int>> pixels;
    int x0 = 1 << 28, y0 = 1 << 28, x1 = -1, y1 = -1;

    void add(int x, int y) {
        pixels.emplace_back(x, y);
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
    }
    int w() const { return x1 - x0 + 1; }
    int h() const { return y1 - y0 + 1; }
    double diag() const { return std::hypot(w(), h()); }
};

std::vector<Component> components8(const BinaryMap& m) {
    std::vector<Component> out;
    std::vector<std::uint8_t> seen(m.bits.size(), 0);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * m.width + x;
            if (!m.bits[i] || seen[i]) continue;
            Component c;
            seen[i] = 1;
            stack.assign(1, {x, y});
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                c.add(cx, cy);
                for (int k = 0; k < 8; ++k) {
                    int nx = cx + kNx[k], ny = cy + kNy[k];
                    if (!m.get(nx, ny)) continue;
                    std::size_t j = static_cast<std::size_t>(ny) * m.width + nx;
                    if (seen[j]) continue;
                    seen[j] = 1;
                    stack.emplace_back(nx, ny);
                }
            }
            out.push_back(std::move(c));
        }
    return out;
}

// --- skeleton path tracing -------------------------------------------------

using Path = std::vector<std::pair<int, int>>;

int degree8(const BinaryMap& m, int x, int y) {
    int d = 0;
    for (int k = 0; k < 8; ++k) d += m.get(x + kNx[k], y + kNy[k]) ? 1 : 0;
    return d;
}

// Walks each stroke once; at junctions the straightest continuation wins, so
// a crossing is traversed as one path and the side branches start their own.
std::vector<Path> trace_paths(const BinaryMap& m) {
    std::vector<std::uint8_t> visited(m.bits.size(), 0);
    auto vis = [&](int x, int y) -> std::uint8_t& {
        return visited[static_cast<std::size_t>(y) * m.width + x];
    };
    std::vector<Path> paths;

    auto walk = [&](int sx, int sy) {
        Path path{{sx, sy}};
        vis(sx, sy) = 1;
        while (true) {
            auto [cx, cy] = path.back();
            double rdx = 0, rdy = 0;
            if (path.size() >= 2) {
                const auto& back = path[path.size() >= 4 ? path.size() - 4 : 0];
                rdx = cx - back.first;
                rdy = cy - back.second;
                double n = std::hypot(rdx, rdy);
                rdx /= n;
                rdy /= n;
            }
            int bx = -1, by = -1;
            double best = -2.0;
            for (int k = 0; k < 8; ++k) {
                int nx = cx + kNx[k], ny = cy + kNy[k];
                if (!m.get(nx, ny) || vis(nx, ny)) continue;
                double dn = std::hypot(kNx[k], kNy[k]);
                double score = path.size() < 2 ? 1.0 - k * 1e-3
                                               : (rdx * kNx[k] + rdy * kNy[k]) / dn;
                if (score > best + 1e-12) {
                    best = score;
                    bx = nx;
                    by = ny;
                }
            }
            if (bx < 0) break;
            path.emplace_back(bx, by);
            vis(bx, by) = 1;
        }
        if (path.size() >= 2) paths.push_back(std::move(path));
    };

    for (int phase = 0; phase < 3; ++phase)
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x) {
                if (!m.get(x, y) || vis(x, y)) continue;
                int d = degree8(m, x, y);
                if (phase == 0 && d > 1) continue;
                if (phase == 1 && d < 3) continue;
                walk(x, y);
            }
    return paths;
}

// --- line and circle fitting ----------------------------------------------

struct LineFit {
    Vec2 centroid{};
    Vec2 dir{1, 0};
    double lo = 0, hi = 0;
    double max_resid = 0;
};

LineFit fit_line(const std::vector<Vec2>& pts) {
    LineFit f;
    double n = static_cast<double>(pts.size());
    for (const auto& p : pts) f.centroid = f.centroid + p;
    f.centroid = f.centroid * (1.0 / n);
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : pts) {
        Vec2 d = p - f.centroid;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    double ang = 0.5 * std::atan2(2 * sxy, sxx - syy);
    f.dir = {std::cos(ang), std::sin(ang)};
    if (f.dir.x < 0 || (std::abs(f.dir.x) < 1e-12 && f.dir.y < 0)) f.dir = f.dir * -1.0;
    f.lo = 1e30;
    f.hi = -1e30;
    for (const auto& p : pts) {
        Vec2 d = p - f.centroid;
        double t = d.dot(f.dir);
        f.lo = std::min(f.lo, t);
        f.hi = std::max(f.hi, t);
        f.max_resid = std::max(f.max_resid, std::abs(d.cross(f.dir)));
    }
    return f;
}

std::optional<CirclePos> circumcircle(const Vec2& a, const Vec2& b, const Vec2& c) {
    double A = a.x - c.x, B = a.y - c.y, C = b.x - c.x, D = b.y - c.y;
    double G = A * D - B * C;
    if (std::abs(G) < 1e-9) return std::nullopt;
    double E = A * (a.x + c.x) / 2 + B * (a.y + c.y) / 2;
    double F = C * (b.x + c.x) / 2 + D * (b.y + c.y) / 2;
    double cx = (D * E - B * F) / G;
    double cy = (A * F - C * E) / G;
    return CirclePos{cx, cy, std::hypot(a.x - cx, a.y - cy)};
}

// Algebraic least-squares circle (Kasa), on centred coordinates.
std::optional<CirclePos> kasa_fit(const std::vector<Vec2>& pts) {
    if (pts.size() < 3) return std::nullopt;
    Vec2 mean{};
    for (const auto& p : pts) mean = mean + p;
    mean = mean * (1.0 / pts.size());
    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sxz = 0, syz = 0, sz = 0;
    double n = static_cast<double>(pts.size());
    for (const auto& p : pts) {
        double x = p.x - mean.x, y = p.y - mean.y;
        double z = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sx += x;
        sy += y;
        sxz += x * z;
        syz += y * z;
        sz += z;
    }
    // [sxx sxy sx][A]   [sxz]
    // [sxy syy sy][B] = [syz]     centre (A/2, B/2), r^2 = C + centre^2
    // [sx  sy  n ][C]   [sz ]
    double m[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, n}};
    double rhs[3] = {sxz, syz, sz};
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                 m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::abs(det) < 1e-9) return std::nullopt;
    auto solve = [&](int col) {
        double t[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t[r][c] = c == col ? rhs[r] : m[r][c];
        double d = t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
                   t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
                   t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
        return d / det;
    };
    double A = solve(0), B = solve(1), C = solve(2);
    double cx = A / 2, cy = B / 2;
    double r2 = C + cx * cx + cy * cy;
    if (r2 <= 0) return std::nullopt;
    return CirclePos{cx + mean.x, cy + mean.y, std::sqrt(r2)};
}

double ccw_offset(double from, double to) {
    double s = to - from;
    while (s < 0) s += 2 * M_PI;
    while (s >= 2 * M_PI) s -= 2 * M_PI;
    return s;
}

}  // namespace

// --- binarize ----------------------------------------------------------------

BinaryMap binarize(const GrayImage& img, int threshold) {
    BinaryMap m(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        m.bits[i] = img.pixels[i] < threshold ? 1 : 0;
    return m;
}

// --- circles -----------------------------------------------------------------

CircleDetection detect_circles(const BinaryMap& skel, const ExtractionConfig& cfg) {
    CircleDetection out;
    out.residue = skel;
    std::mt19937_64 rng(cfg.rng_seed);
    const double rmin = 6.0;
    const double rmax = 0.75 * std::max(skel.width, skel.height);

    for (int round = 0; round < 8; ++round) {
        std::vector<Vec2> px;
        for (int y = 0; y < out.residue.height; ++y)
            for (int x = 0; x < out.residue.width; ++x)
                if (out.residue.at(x, y)) px.push_back(px_center(x, y));
        if (px.size() < 30) break;

        auto paths = trace_paths(out.residue);
        std::vector<const Path*> long_paths;
        std::size_t total_len = 0;
        for (const auto& p : paths)
            if (p.size() >= 17) {
                long_paths.push_back(&p);
                total_len += p.size();
            }

        auto count_inliers = [&](const CirclePos& c) {
            int cnt = 0;
            for (const auto& q : px)
                if (std::abs(q.dist(c.center()) - c.r) <= cfg.inlier_tol) ++cnt;
            return cnt;
        };

        struct Hyp {
            CirclePos c;
            int count;
        };
        std::vector<Hyp> hyps;
        int iters = cfg.circle_iters * 3;
        for (int it = 0; it < iters; ++it) {
            Vec2 a, b, c;
            if (!long_paths.empty() && it % 2 == 0) {
                std::size_t pick = rng() % total_len;
                const Path* path = long_paths.back();
                for (const Path* p : long_paths) {
                    if (pick < p->size()) {
                        path = p;
                        break;
                    }
                    pick -= p->size();
                }
                int len = static_cast<int>(path->size());
                int dmax = std::min(25, (len - 1) / 2);
                if (dmax < 7) continue;
                int dd = 7 + static_cast<int>(rng() % static_cast<std::uint64_t>(dmax - 6));
                int ss = static_cast<int>(rng() % static_cast<std::uint64_t>(len - 2 * dd));
                a = px_center((*path)[ss].first, (*path)[ss].second);
                b = px_center((*path)[ss + dd].first, (*path)[ss + dd].second);
                c = px_center((*path)[ss + 2 * dd].first, (*path)[ss + 2 * dd].second);
            } else {
                std::size_t i = rng() % px.size(), j = rng() % px.size(), k = rng() % px.size();
                if (i == j || j == k || i == k) continue;
                a = px[i];
                b = px[j];
                c = px[k];
            }
            auto cc = circumcircle(a, b, c);
            if (!cc || cc->r < rmin || cc->r > rmax) continue;
            int cnt = count_inliers(*cc);
            if (cnt >= 20) hyps.push_back({*cc, cnt});
        }

        std::sort(hyps.begin(), hyps.end(), [](const Hyp& a, const Hyp& b) {
            if (a.count != b.count) return a.count > b.count;
            if (a.c.x != b.c.x) return a.c.x < b.c.x;
            if (a.c.y != b.c.y) return a.c.y < b.c.y;
            return a.c.r < b.c.r;
        });

        bool accepted = false;
        std::vector<CirclePos> tried;
        for (const auto& hyp : hyps) {
            if (tried.size() >= 12) break;
            bool dup = false;
            for (const auto& t : tried)
                if (std::hypot(t.x - hyp.c.x, t.y - hyp.c.y) <= 3 && std::abs(t.r - hyp.c.r) <= 3)
                    dup = true;
            if (dup) continue;
            tried.push_back(hyp.c);

            CirclePos model = hyp.c;
            std::vector<Vec2> inliers;
            for (int refit = 0; refit < 2; ++refit) {
                inliers.clear();
                for (const auto& q : px)
                    if (std::abs(q.dist(model.center()) - model.r) <= cfg.inlier_tol)
                        inliers.push_back(q);
                if (inliers.size() < 20) break;
                auto k = kasa_fit(inliers);
                if (k && k->r >= rmin && k->r <= rmax) model = *k;
            }
            if (inliers.size() < 20) continue;

            // the support must form one contiguous angular run; a tolerant
            // gap absorbs crossing damage but keeps tangent grazes apart
            std::vector<double> angs;
            angs.reserve(inliers.size());
            for (const auto& q : inliers)
                angs.push_back(std::atan2(q.y - model.y, q.x - model.x));
            std::sort(angs.begin(), angs.end());
            // crossings knock out a fixed few pixels of arc, so tolerate
            // gaps by arc length; a fixed angle would gape on big rings
            double gap_tol = std::clamp(9.0 / model.r, 4.0 * M_PI / 180.0,
                                        18.0 * M_PI / 180.0);

            // split circularly at every gap wider than the tolerance
            std::vector<std::size_t> gap_at;  // run ends after angs[i]
            for (std::size_t i = 0; i + 1 < angs.size(); ++i)
                if (angs[i + 1] - angs[i] > gap_tol) gap_at.push_back(i);
            bool wraps = angs.front() + 2 * M_PI - angs.back() <= gap_tol;
            if (!wraps) gap_at.push_back(angs.size() - 1);

            double run_lo = 0, run_hi = 0, run_extent = -1;
            std::size_t run_count = 0;
            if (gap_at.empty()) {
                run_extent = 2 * M_PI;
                run_count = angs.size();
            } else {
                for (std::size_t g = 0; g < gap_at.size(); ++g) {
                    std::size_t first = (gap_at[(g + gap_at.size() - 1) % gap_at.size()] + 1) %
                                        angs.size();
                    std::size_t last = gap_at[g];
                    double lo = angs[first], hi = angs[last];
                    double extent = hi - lo;
                    std::size_t n2 = last + 1 - first;
                    if (first > last) {  // run crosses the wrap point
                        extent += 2 * M_PI;
                        n2 = angs.size() - first + last + 1;
                    }
                    if (extent > run_extent) {
                        run_extent = extent;
                        run_lo = lo;
                        run_hi = hi;
                        run_count = n2;
                    }
                }
            }
            if (run_extent * 180.0 / M_PI < cfg.min_arc_coverage_deg) continue;
            double arc_px = run_extent * model.r;
            if (static_cast<double>(run_count) < std::max(20.0, 0.55 * arc_px)) continue;

            // a shallow graze along straight strokes stays near its chord;
            // a real arc of this span bulges well clear of it
            if (run_extent < 2.0 * M_PI / 3.0) {
                Vec2 e0 = model.center() + Vec2{std::cos(run_lo), std::sin(run_lo)} * model.r;
                Vec2 e1 = model.center() + Vec2{std::cos(run_hi), std::sin(run_hi)} * model.r;
                if (e0.dist(e1) > 1e-9) {
                    LinePos chord{e0.x, e0.y, e1.x, e1.y};
                    bool crossed = run_hi < run_lo;
                    double bulge = 0;
                    for (const auto& q : inliers) {
                        double a2 = std::atan2(q.y - model.y, q.x - model.x);
                        bool in_run = crossed ? (a2 >= run_lo - 1e-9 || a2 <= run_hi + 1e-9)
                                              : (a2 >= run_lo - 1e-9 && a2 <= run_hi + 1e-9);
                        if (in_run) bulge = std::max(bulge, dist_point_line(q, chord));
                    }
                    if (bulge < 2.5) continue;
                }
            }

            FittedCircle f;
            f.pos = model;
            f.support = static_cast<int>(inliers.size());
            if (run_extent < 2 * M_PI - 15.0 * M_PI / 180.0) {
                f.arc = true;
                f.arc_e0 = model.center() + Vec2{std::cos(run_lo), std::sin(run_lo)} * model.r;
                f.arc_e1 = model.center() + Vec2{std::cos(run_hi), std::sin(run_hi)} * model.r;
            }
            out.circles.push_back(f);

            for (int y = 0; y < out.residue.height; ++y)
                for (int x = 0; x < out.residue.width; ++x) {
                    if (!out.residue.at(x, y)) continue;
                    if (std::abs(px_center(x, y).dist(model.center()) - model.r) <=
                        cfg.inlier_tol)
                        out.residue.at(x, y) = 0;
                }
            accepted = true;
            break;
        }
        if (!accepted) break;
    }
    log_debug("detect_circles: " + std::to_string(out.circles.size()) + " circle(s)");
    return out;
}

// --- segments ----------------------------------------------------------------

namespace {

struct Run {
    std::vector<Vec2> px;
    LineFit fit;
};

void dp_split(const Path& path, int lo, int hi, double tol, std::vector<std::pair<int, int>>& out) {
    if (hi - lo + 1 <= 2) {
        out.emplace_back(lo, hi);
        return;
    }
    Vec2 a = px_center(path[lo].first, path[lo].second);
    Vec2 b = px_center(path[hi].first, path[hi].second);
    Vec2 ab = b - a;
    double len = ab.norm();
    int worst = -1;
    double wd = 0;
    for (int i = lo + 1; i < hi; ++i) {
        Vec2 p = px_center(path[i].first, path[i].second);
        double d = len < 1e-9 ? p.dist(a) : std::abs((p - a).cross(ab)) / len;
        if (d > wd) {
            wd = d;
            worst = i;
        }
    }
    if (wd > tol && worst > lo && worst < hi) {
        dp_split(path, lo, worst, tol, out);
        dp_split(path, worst, hi, tol, out);
    } else {
        out.emplace_back(lo, hi);
    }
}

bool mergeable(const Run& a, const Run& b, const ExtractionConfig& cfg,
               const std::vector<FittedCircle>& removed) {
    // direction estimates on short pieces wobble too much for an angle
    // gate; the union refit decides for them
    double la = a.fit.hi - a.fit.lo, lb = b.fit.hi - b.fit.lo;
    if (la >= 20 && lb >= 20) {
        double cosang = std::abs(a.fit.dir.dot(b.fit.dir));
        if (cosang < std::cos(cfg.merge_angle_deg * M_PI / 180.0)) return false;
    }
    std::vector<Vec2> uni = a.px;
    uni.insert(uni.end(), b.px.begin(), b.px.end());
    LineFit u = fit_line(uni);
    if (u.max_resid > cfg.split_tol) return false;

    auto interval = [&](const Run& r) {
        double lo = 1e30, hi = -1e30;
        for (const auto& p : r.px) {
            double t = (p - u.centroid).dot(u.dir);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        return std::pair<double, double>{lo, hi};
    };
    auto [alo, ahi] = interval(a);
    auto [blo, bhi] = interval(b);
    double gap = std::max(alo, blo) - std::min(ahi, bhi);
    if (gap <= cfg.merge_gap) return true;

    // a longer gap is fine when its corridor hugs a ring that circle
    // subtraction wiped (tangent and secant crossings)
    double t0 = std::min(ahi, bhi), t1 = std::max(alo, blo);
    for (const auto& c : removed) {
        bool ok = true;
        for (int k = 0; k <= 6 && ok; ++k) {
            double t = t0 + (t1 - t0) * k / 6.0;
            Vec2 p = u.centroid + u.dir * t;
            if (std::abs(p.dist(c.pos.center()) - c.pos.r) > cfg.inlier_tol + 2.5) ok = false;
        }
        if (ok) return true;
    }
    return false;
}

LineStyle classify_style(const Run& r, LinePos& pos) {
    std::vector<double> ts;
    ts.reserve(r.px.size());
    for (const auto& p : r.px) ts.push_back((p - r.fit.centroid).dot(r.fit.dir));
    std::sort(ts.begin(), ts.end());
    double span = ts.back() - ts.front();
    if (span < 1e-9) return LineStyle::Solid;
    struct Gap {
        double size, center;
    };
    std::vector<Gap> gaps;
    double total_gap = 0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        double g = ts[i + 1] - ts[i];
        if (g > 2.5) {
            gaps.push_back({g, (ts[i + 1] + ts[i]) / 2});
            total_gap += g;
        }
    }
    if (gaps.empty()) return LineStyle::Solid;
    double mid = (ts.front() + ts.back()) / 2;
    int first_half = 0, second_half = 0;
    for (const auto& g : gaps) (g.center < mid ? first_half : second_half)++;
    double frac = total_gap / span;
    bool one_sided = first_half == 0 || second_half == 0;
    if (static_cast<int>(gaps.size()) >= 2 && one_sided && frac >= 0.1) {
        // solid half leads: flip so the dashed half sits at the far end
        if (second_half == 0) std::swap(pos.x1, pos.x2), std::swap(pos.y1, pos.y2);
        return LineStyle::Mixed;
    }
    if (static_cast<int>(gaps.size()) >= 3 && frac >= 0.15) return LineStyle::Dash;
    return LineStyle::Solid;
}

}  // namespace

std::vector<FittedSegment> detect_segments(const BinaryMap& skel_minus_circles,
                                           const ExtractionConfig& cfg,
                                           const std::vector<FittedCircle>& removed) {
    auto paths = trace_paths(skel_minus_circles);
    std::vector<Run> runs;
    for (const auto& path : paths) {
        std::vector<std::pair<int, int>> cuts;
        dp_split(path, 0, static_cast<int>(path.size()) - 1, cfg.split_tol, cuts);
        for (auto [lo, hi] : cuts) {
            if (hi - lo + 1 < 2) continue;
            Run r;
            for (int i = lo; i <= hi; ++i) r.px.push_back(px_center(path[i].first, path[i].second));
            r.fit = fit_line(r.px);
            runs.push_back(std::move(r));
        }
    }

    bool merged_any = true;
    while (merged_any) {
        merged_any = false;
        for (std::size_t i = 0; i < runs.size() && !merged_any; ++i)
            for (std::size_t j = i + 1; j < runs.size() && !merged_any; ++j) {
                if (!mergeable(runs[i], runs[j], cfg, removed)) continue;
                runs[i].px.insert(runs[i].px.end(), runs[j].px.begin(), runs[j].px.end());
                runs[i].fit = fit_line(runs[i].px);
                runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(j));
                merged_any = true;
            }
    }

    std::vector<FittedSegment> out;
    for (auto& r : runs) {
        double len = r.fit.hi - r.fit.lo;
        if (len < cfg.min_seg_length) continue;
        FittedSegment s;
        Vec2 a = r.fit.centroid + r.fit.dir * r.fit.lo;
        Vec2 b = r.fit.centroid + r.fit.dir * r.fit.hi;
        s.pos = {a.x, a.y, b.x, b.y};
        s.style = classify_style(r, s.pos);
        s.pixels = std::move(r.px);
        out.push_back(std::move(s));
    }
    // reading order, for stable ids
    std::sort(out.begin(), out.end(), [](const FittedSegment& a, const FittedSegment& b) {
        Vec2 ma = a.pos.midpoint(), mb = b.pos.midpoint();
        if (ma.y != mb.y) return ma.y < mb.y;
        return ma.x < mb.x;
    });
    log_debug("detect_segments: " + std::to_string(out.size()) + " segment(s)");
    return out;
}

// --- points ------------------------------------------------------------------

namespace {

int kind_priority(PointKind k) {
    switch (k) {
        case PointKind::Center: return 4;
        case PointKind::Tangent: return 3;
        case PointKind::Intersection: return 2;
        case PointKind::Endpoint: return 1;
        case PointKind::Independent: return 0;
    }
    return 0;
}

void sort_unique(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<DerivedPoint> detect_points(const std::vector<FittedSegment>& lines,
                                        const std::vector<FittedCircle>& circles,
                                        const ExtractionConfig& cfg,
                                        const std::vector<Vec2>& dots) {
    const double ext = cfg.point_merge_dist;
    std::vector<DerivedPoint> cand;

    auto on_span = [&](const FittedCircle& c, const Vec2& p) {
        if (!c.arc) return true;
        double a0 = std::atan2(c.arc_e0.y - c.pos.y, c.arc_e0.x - c.pos.x);
        double a1 = std::atan2(c.arc_e1.y - c.pos.y, c.arc_e1.x - c.pos.x);
        double span = ccw_offset(a0, a1);
        double margin = 3.0 / std::max(c.pos.r, 1.0);
        double off = ccw_offset(a0, std::atan2(p.y - c.pos.y, p.x - c.pos.x));
        return off <= span + margin || off >= 2 * M_PI - margin;
    };

    // line x line
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const LinePos& s1 = lines[i].pos;
            const LinePos& s2 = lines[j].pos;
            Vec2 u1 = s1.dir(), u2 = s2.dir();
            double denom = u1.cross(u2);
            if (std::abs(denom) < 1e-6) continue;
            Vec2 d = s2.a() - s1.a();
            double t1 = d.cross(u2) / denom;
            double t2 = d.cross(u1) / denom;
            if (t1 < -ext || t1 > s1.length() + ext) continue;
            if (t2 < -ext || t2 > s2.length() + ext) continue;
            DerivedPoint p;
            p.xy = s1.a() + u1 * t1;
            p.kind = PointKind::Intersection;
            p.on_lines = {static_cast<int>(i), static_cast<int>(j)};
            cand.push_back(std::move(p));
        }

    // line x circle
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t k = 0; k < circles.size(); ++k) {
            const LinePos& s = lines[i].pos;
            const CirclePos& c = circles[k].pos;
            Vec2 u = s.dir();
            double foot_t = (c.center() - s.a()).dot(u);
            double d = std::abs((c.center() - s.a()).cross(u));
            if (std::abs(d - c.r) <= cfg.inlier_tol) {
                Vec2 q = s.a() + u * foot_t;
                if (foot_t >= -ext && foot_t <= s.length() + ext && on_span(circles[k], q)) {
                    DerivedPoint p;
                    p.xy = q;
                    p.kind = PointKind::Tangent;
                    p.on_lines = {static_cast<int>(i)};
                    p.on_circles = {static_cast<int>(k)};
                    cand.push_back(std::move(p));
                }
            } else if (d < c.r) {
                double h = std::sqrt(c.r * c.r - d * d);
                for (double t : {foot_t - h, foot_t + h}) {
                    if (t < -ext || t > s.length() + ext) continue;
                    Vec2 q = s.a() + u * t;
                    if (!on_span(circles[k], q)) continue;
                    DerivedPoint p;
                    p.xy = q;
                    p.kind = PointKind::Intersection;
                    p.on_lines = {static_cast<int>(i)};
                    p.on_circles = {static_cast<int>(k)};
                    cand.push_back(std::move(p));
                }
            }
        }

    // circle x circle
    for (std::size_t k = 0; k < circles.size(); ++k)
        for (std::size_t l = k + 1; l < circles.size(); ++l) {
            const CirclePos& c1 = circles[k].pos;
            const CirclePos& c2 = circles[l].pos;
            double D = c1.center().dist(c2.center());
            if (D < 1e-9) continue;
            Vec2 dir = (c2.center() - c1.center()) * (1.0 / D);
            if (std::abs(D - (c1.r + c2.r)) <= cfg.inlier_tol ||
                std::abs(D - std::abs(c1.r - c2.r)) <= cfg.inlier_tol) {
                Vec2 q = c1.center() + dir * c1.r;
                if (on_span(circles[k], q) && on_span(circles[l], q)) {
                    DerivedPoint p;
                    p.xy = q;
                    p.kind = PointKind::Tangent;
                    p.on_circles = {static_cast<int>(k), static_cast<int>(l)};
                    cand.push_back(std::move(p));
                }
            } else if (D < c1.r + c2.r && D > std::abs(c1.r - c2.r)) {
                double aa = (D * D + c1.r * c1.r - c2.r * c2.r) / (2 * D);
                double h2 = c1.r * c1.r - aa * aa;
                if (h2 <= 0) continue;
                double h = std::sqrt(h2);
                Vec2 m = c1.center() + dir * aa;
                for (double sgn : {1.0, -1.0}) {
                    Vec2 q = m + dir.perp() * (sgn * h);
                    if (!on_span(circles[k], q) || !on_span(circles[l], q)) continue;
                    DerivedPoint p;
                    p.xy = q;
                    p.kind = PointKind::Intersection;
                    p.on_circles = {static_cast<int>(k), static_cast<int>(l)};
                    cand.push_back(std::move(p));
                }
            }
        }

    // endpoints and arc endpoints
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (int side = 0; side < 2; ++side) {
            DerivedPoint p;
            p.xy = side == 0 ? lines[i].pos.a() : lines[i].pos.b();
            p.kind = PointKind::Endpoint;
            p.on_lines = {static_cast<int>(i)};
            p.endpoint_of = {2 * static_cast<int>(i) + side};
            cand.push_back(std::move(p));
        }
    for (std::size_t k = 0; k < circles.size(); ++k) {
        if (!circles[k].arc) continue;
        for (int side = 0; side < 2; ++side) {
            DerivedPoint p;
            p.xy = side == 0 ? circles[k].arc_e0 : circles[k].arc_e1;
            p.kind = PointKind::Endpoint;
            p.on_circles = {static_cast<int>(k)};
            p.arc_end_of = {2 * static_cast<int>(k) + side};
            cand.push_back(std::move(p));
        }
    }

    // ink dots: centre markers near a fitted centre, free points elsewhere
    for (const auto& d : dots) {
        DerivedPoint p;
        p.xy = d;
        p.kind = PointKind::Independent;
        for (std::size_t k = 0; k < circles.size(); ++k)
            if (d.dist(circles[k].pos.center()) <= cfg.point_merge_dist) {
                p.kind = PointKind::Center;
                p.center_of.push_back(static_cast<int>(k));
            }
        cand.push_back(std::move(p));
    }

    // transitive merge within the merge distance
    std::vector<std::size_t> parent(cand.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (std::size_t i = 0; i < cand.size(); ++i)
        for (std::size_t j = i + 1; j < cand.size(); ++j)
            if (cand[i].xy.dist(cand[j].xy) <= cfg.point_merge_dist)
                parent[find(i)] = find(j);

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < cand.size(); ++i) groups[find(i)].push_back(i);

    std::vector<DerivedPoint> out;
    for (const auto& [root, members] : groups) {
        DerivedPoint p;
        Vec2 sum{};
        int best = -1;
        for (std::size_t m : members) {
            const DerivedPoint& c = cand[m];
            sum = sum + c.xy;
            if (kind_priority(c.kind) > best) {
                best = kind_priority(c.kind);
                p.kind = c.kind;
            }
            p.on_lines.insert(p.on_lines.end(), c.on_lines.begin(), c.on_lines.end());
            p.endpoint_of.insert(p.endpoint_of.end(), c.endpoint_of.begin(), c.endpoint_of.end());
            p.on_circles.insert(p.on_circles.end(), c.on_circles.begin(), c.on_circles.end());
            p.center_of.insert(p.center_of.end(), c.center_of.begin(), c.center_of.end());
            p.arc_end_of.insert(p.arc_end_of.end(), c.arc_end_of.begin(), c.arc_end_of.end());
        }
        p.xy = sum * (1.0 / members.size());
        sort_unique(p.on_lines);
        sort_unique(p.endpoint_of);
        sort_unique(p.on_circles);
        sort_unique(p.center_of);
        sort_unique(p.arc_end_of);
        // a point that lands on a circle's centre names that centre, dot or not
        for (std::size_t k = 0; k < circles.size(); ++k)
            if (p.xy.dist(circles[k].pos.center()) <= cfg.point_merge_dist)
                p.center_of.push_back(static_cast<int>(k));
        sort_unique(p.center_of);
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const DerivedPoint& a, const DerivedPoint& b) {
        if (a.xy.y != b.xy.y) return a.xy.y < b.xy.y;
        return a.xy.x < b.xy.x;
    });
    return out;
}

// --- non-geometric residual --------------------------------------------------

namespace {

// Pearson correlation of two same-size binary grids.
double ncc(const std::vector<double>& a, const std::vector<double>& b) {
    double n = static_cast<double>(a.size());
    double sa = std::accumulate(a.begin(), a.end(), 0.0);
    double sb = std::accumulate(b.begin(), b.end(), 0.0);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += a[i] * b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
    }
    double cov = sab - sa * sb / n;
    double va = saa - sa * sa / n;
    double vb = sbb - sb * sb / n;
    if (va <= 1e-12 || vb <= 1e-12) return 0.0;
    return cov / std::sqrt(va * vb);
}

struct Blob {
    std::vector<std::pair<int, int>> pixels;
    int x0, y0, x1, y1;
    bool filled(int x, int y, const BinaryMap& residual) const { return residual.get(x, y); }
};

double match_symbol(const Blob& blob, const BinaryMap& residual, const GlyphBitmap& g) {
    int bw = blob.x1 - blob.x0 + 1, bh = blob.y1 - blob.y0 + 1;
    if (std::abs(bw - g.w) > 3 || std::abs(bh - g.h) > 3) return -1.0;
    int w = std::max(bw, g.w), h = std::max(bh, g.h);
    int bx = (w - bw) / 2, by = (h - bh) / 2;
    int gx = (w - g.w) / 2, gy = (h - g.h) / 2;
    std::vector<double> va(static_cast<std::size_t>(w) * h, 0.0);
    std::vector<double> vb(va.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int ax = x - bx + blob.x0, ay = y - by + blob.y0;
            if (ax >= blob.x0 && ax <= blob.x1 && ay >= blob.y0 && ay <= blob.y1 &&
                residual.get(ax, ay))
                va[static_cast<std::size_t>(y) * w + x] = 1.0;
            int cx = x - gx, cy = y - gy;
            if (cx >= 0 && cx < g.w && cy >= 0 && cy < g.h && g.at(cx, cy))
                vb[static_cast<std::size_t>(y) * w + x] = 1.0;
        }
    return ncc(va, vb);
}

struct TextDecode {
    std::string content;
    double score = 0;
};

std::optional<TextDecode> decode_text(const Blob& blob, const BinaryMap& residual) {
    int bw = blob.x1 - blob.x0 + 1, bh = blob.y1 - blob.y0 + 1;
    if (bh > kFontH + 2 || bw < 2) return std::nullopt;
    std::optional<TextDecode> best;
    for (int dy = 0; dy <= 3; ++dy)
        for (int dx = 0; dx <= 3; ++dx) {
            int oy = blob.y0 - dy;
            int ox = blob.x0 - dx;
            for (int n = std::max(1, (bw + dx) / kFontPitch);
                 n <= (bw + dx) / kFontPitch + 1; ++n) {
                double total = 0;
                std::string content;
                bool ok = true;
                for (int i = 0; i < n && ok; ++i) {
                    std::vector<double> cell(static_cast<std::size_t>(kFontW) * kFontH, 0.0);
                    for (int y = 0; y < kFontH; ++y)
                        for (int x = 0; x < kFontW; ++x)
                            if (residual.get(ox + i * kFontPitch + x, oy + y))
                                cell[static_cast<std::size_t>(y) * kFontW + x] = 1.0;
                    double cbest = -1;
                    std::string cch;
                    for (const auto& ch : font_charset()) {
                        auto cols = font_columns(ch);
                        std::vector<double> tpl(cell.size(), 0.0);
                        for (int x = 0; x < kFontW; ++x)
                            for (int y = 0; y < kFontH; ++y)
                                if (cols[x] & (1u << y))
                                    tpl[static_cast<std::size_t>(y) * kFontW + x] = 1.0;
                        double s = ncc(cell, tpl);
                        if (s > cbest) {
                            cbest = s;
                            cch = ch;
                        }
                    }
                    if (cbest < 0.85) {
                        ok = false;
                        break;
                    }
                    content += cch;
                    total += cbest;
                }
                if (!ok) continue;
                // ink the cells leave unexplained discounts the decode, so a
                // clean prefix cannot beat the full string
                std::size_t covered = 0;
                for (const auto& [px2, py2] : blob.pixels) {
                    if (py2 < oy || py2 > oy + kFontH - 1) continue;
                    int rel = px2 - ox;
                    if (rel < 0 || rel >= n * kFontPitch) continue;
                    if (rel % kFontPitch < kFontW) ++covered;
                }
                double mean = total / n * static_cast<double>(covered) /
                              static_cast<double>(blob.pixels.size());
                if (!best || mean > best->score) best = TextDecode{content, mean};
            }
        }
    if (best && best->score < 0.8) return std::nullopt;
    return best;
}

}  // namespace

std::vector<NonGeoPrimitive> detect_nongeo(const GrayImage& img, const BinaryMap& bin,
                                           const BinaryMap& geo_ink,
                                           const ExtractionConfig& cfg) {
    (void)img;
    (void)cfg;
    if (bin.width != geo_ink.width || bin.height != geo_ink.height)
        throw std::invalid_argument("detect_nongeo: geo ink dimensions mismatch");
    BinaryMap residual(bin.width, bin.height);
    for (std::size_t i = 0; i < bin.bits.size(); ++i)
        residual.bits[i] = bin.bits[i] && !geo_ink.bits[i] ? 1 : 0;

    auto comps = components8(residual);
    comps.erase(std::remove_if(comps.begin(), comps.end(),
                               [](const Component& c) { return c.pixels.size() < 3; }),
                comps.end());

    // group components whose boxes sit within 4 px of each other
    std::vector<std::size_t> parent(comps.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (std::size_t j = i + 1; j < comps.size(); ++j) {
            const Component& a = comps[i];
            const Component& b = comps[j];
            int dxg = std::max({0, b.x0 - a.x1, a.x0 - b.x1});
            int dyg = std::max({0, b.y0 - a.y1, a.y0 - b.y1});
            if (std::max(dxg, dyg) <= 4) parent[find(i)] = find(j);
        }
    std::map<std::size_t, Blob> blobs;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        Blob& b = blobs.try_emplace(find(i), Blob{{}, 1 << 28, 1 << 28, -1, -1}).first->second;
        b.pixels.insert(b.pixels.end(), comps[i].pixels.begin(), comps[i].pixels.end());
        b.x0 = std::min(b.x0, comps[i].x0);
        b.y0 = std::min(b.y0, comps[i].y0);
        b.x1 = std::max(b.x1, comps[i].x1);
        b.y1 = std::max(b.y1, comps[i].y1);
    }
    std::vector<Blob> ordered;
    for (auto& [root, b] : blobs) ordered.push_back(std::move(b));
    std::sort(ordered.begin(), ordered.end(), [](const Blob& a, const Blob& b) {
        if (a.y0 != b.y0) return a.y0 < b.y0;
        return a.x0 < b.x0;
    });

    std::vector<NonGeoPrimitive> out;
    for (const auto& blob : ordered) {
        double best_sym = -1;
        SymbolClass best_cls = SymbolClass::Unknown;
        int best_rot = 0;
        for (const auto& g : glyph_atlas()) {
            double s = match_symbol(blob, residual, g);
            if (s > best_sym) {
                best_sym = s;
                best_cls = g.cls;
                best_rot = g.rot;
            }
        }
        auto text = decode_text(blob, residual);

        NonGeoPrimitive prim;
        prim.box = {static_cast<double>(blob.x0), static_cast<double>(blob.y0),
                    static_cast<double>(blob.x1 + 1), static_cast<double>(blob.y1 + 1)};
        if (best_sym >= 0.9) {
            prim.kind = NonGeoPrimitive::Kind::Symbol;
            prim.symbol_class = best_cls;
            prim.render_rot = best_rot;
        } else if (text) {
            prim.kind = NonGeoPrimitive::Kind::Text;
            prim.symbol_class = SymbolClass::Text;
            prim.content = text->content;
        } else if (best_sym >= 0.6) {
            prim.kind = NonGeoPrimitive::Kind::Symbol;
            prim.symbol_class = best_cls;
            prim.render_rot = best_rot;
        } else {
            prim.kind = NonGeoPrimitive::Kind::Symbol;
            prim.symbol_class = SymbolClass::Unknown;
        }
        out.push_back(std::move(prim));
    }
    return out;
}

// --- mean shift --------------------------------------------------------------

std::vector<int> mean_shift(const std::vector<std::vector<double>>& samples, double bandwidth) {
    if (bandwidth <= 0) throw std::invalid_argument("mean_shift: bandwidth must be positive");
    if (samples.empty()) return {};
    std::size_t dim = samples[0].size();
    for (const auto& s : samples)
        if (s.size() != dim) throw std::invalid_argument("mean_shift: ragged samples");

    auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0;
        for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(d);
    };

    std::vector<std::vector<double>> modes = samples;
    for (auto& m : modes) {
        for (int it = 0; it < 300; ++it) {
            std::vector<double> next(dim, 0.0);
            int cnt = 0;
            for (const auto& s : samples)
                if (dist(m, s) <= bandwidth) {
                    for (std::size_t k = 0; k < dim; ++k) next[k] += s[k];
                    ++cnt;
                }
            for (auto& v : next) v /= cnt;
            double shift = dist(m, next);
            m = std::move(next);
            if (shift < 1e-3 * bandwidth) break;
        }
    }

    // merge modes within half a bandwidth, transitively
    std::vector<std::size_t> parent(modes.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = i + 1; j < modes.size(); ++j)
            if (dist(modes[i], modes[j]) <= bandwidth / 2) parent[find(i)] = find(j);

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < modes.size(); ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<double>> centers;
    for (const auto& [root, members] : groups) {
        std::vector<double> c(dim, 0.0);
        for (std::size_t m : members)
            for (std::size_t k = 0; k < dim; ++k) c[k] += modes[m][k];
        for (auto& v : c) v /= static_cast<double>(members.size());
        centers.push_back(std::move(c));
    }
    std::sort(centers.begin(), centers.end());

    std::vector<int> labels(samples.size(), 0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double bd = 1e300;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            double d = dist(samples[i], centers[c]);
            if (d < bd - 1e-12) {
                bd = d;
                labels[i] = static_cast<int>(c);
            }
        }
    }
    return labels;
}

// --- full pipeline -----------------------------------------------------------

namespace {

// a lone dash: thin, straight, a few pixels long; glyph ink is blockier
bool dash_like(const Component& c, double stroke_width) {
    if (c.pixels.size() < 3) return false;
    std::vector<Vec2> px;
    px.reserve(c.pixels.size());
    for (auto [x, y] : c.pixels) px.push_back(px_center(x, y));
    LineFit f = fit_line(px);
    return f.max_resid <= 0.45 * stroke_width + 0.6 && f.hi - f.lo >= 2.5;
}

bool dot_like(const Component& c) {
    if (c.pixels.size() < 8 || c.pixels.size() > 20) return false;
    if (c.w() < 3 || c.w() > 6 || c.h() < 3 || c.h() > 6) return false;
    double mx = 0, my = 0;
    for (auto [x, y] : c.pixels) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(c.pixels.size());
    my /= static_cast<double>(c.pixels.size());
    for (auto [x, y] : c.pixels)
        if (std::hypot(x - mx, y - my) > 3.2) return false;
    // solid core: the four pixels around the centroid are all ink
    auto has = [&](int px, int py) {
        for (auto [x, y] : c.pixels)
            if (x == px && y == py) return true;
        return false;
    };
    int cx = static_cast<int>(std::floor(mx)), cy = static_cast<int>(std::floor(my));
    return has(cx, cy) && has(cx + 1, cy) && has(cx, cy + 1) && has(cx + 1, cy + 1);
}

}  // namespace

GroundTruthScene extract_scene(const GrayImage& img, const ExtractionConfig& cfg) {
    BinaryMap bin = binarize(img, cfg.binarize_threshold);

    // strokes go to the skeleton stage, glyph-sized ink stays behind
    auto comps = components8(bin);
    BinaryMap strokes(bin.width, bin.height);
    std::vector<Vec2> dots;
    std::vector<const Component*> dot_comps;
    for (const auto& c : comps) {
        if (c.diag() >= cfg.small_ink_diag || dash_like(c, cfg.stroke_width)) {
            for (auto [x, y] : c.pixels) strokes.at(x, y) = 1;
        } else if (dot_like(c)) {
            double mx = 0, my = 0;
            for (auto [x, y] : c.pixels) {
                mx += x + 0.5;
                my += y + 0.5;
            }
            dots.emplace_back(mx / c.pixels.size(), my / c.pixels.size());
            dot_comps.push_back(&c);
        }
    }

    BinaryMap skel = skeletonize(strokes);
    CircleDetection cd = detect_circles(skel, cfg);
    std::vector<FittedSegment> segs = detect_segments(cd.residue, cfg, cd.circles);
    std::vector<DerivedPoint> pts = detect_points(segs, cd.circles, cfg, dots);

    // ink explained by the fitted geometry (capsules, rings, dots)
    BinaryMap geo_ink(bin.width, bin.height);
    double band = cfg.stroke_width / 2.0 + 1.1;
    for (const auto& s : segs) {
        Vec2 a = s.pos.a(), b = s.pos.b();
        Vec2 u = s.pos.dir();
        double len = s.pos.length();
        int x0 = static_cast<int>(std::floor(std::min(a.x, b.x) - band - 1));
        int x1 = static_cast<int>(std::ceil(std::max(a.x, b.x) + band + 1));
        int y0 = static_cast<int>(std::floor(std::min(a.y, b.y) - band - 1));
        int y1 = static_cast<int>(std::ceil(std::max(a.y, b.y) + band + 1));
        for (int y = std::max(0, y0); y <= std::min(bin.height - 1, y1); ++y)
            for (int x = std::max(0, x0); x <= std::min(bin.width - 1, x1); ++x) {
                Vec2 q = px_center(x, y);
                double t = std::clamp((q - a).dot(u), 0.0, len);
                if (q.dist(a + u * t) <= band) geo_ink.at(x, y) = 1;
            }
    }
    for (const auto& c : cd.circles) {
        int x0 = static_cast<int>(std::floor(c.pos.x - c.pos.r - band - 1));
        int x1 = static_cast<int>(std::ceil(c.pos.x + c.pos.r + band + 1));
        int y0 = static_cast<int>(std::floor(c.pos.y - c.pos.r - band - 1));
        int y1 = static_cast<int>(std::ceil(c.pos.y + c.pos.r + band + 1));
        for (int y = std::max(0, y0); y <= std::min(bin.height - 1, y1); ++y)
            for (int x = std::max(0, x0); x <= std::min(bin.width - 1, x1); ++x)
                if (std::abs(px_center(x, y).dist(c.pos.center()) - c.pos.r) <= band)
                    geo_ink.at(x, y) = 1;
    }
    for (const Component* dc : dot_comps)
        for (auto [x, y] : dc->pixels)
            for (int oy = -1; oy <= 1; ++oy)
                for (int ox = -1; ox <= 1; ++ox)
                    if (geo_ink.inside(x + ox, y + oy)) geo_ink.at(x + ox, y + oy) = 1;

    std::vector<NonGeoPrimitive> nongeo = detect_nongeo(img, bin, geo_ink, cfg);

    GroundTruthScene scene = assemble_geo(segs, cd.circles, pts, img.width, img.height, cfg);

    std::size_t si = 0, ti = 0;
    for (auto& n : nongeo) {
        if (n.kind == NonGeoPrimitive::Kind::Text)
            n.id = "T" + std::to_string(ti++);
        else
            n.id = "S" + std::to_string(si++);
        (n.kind == NonGeoPrimitive::Kind::Text ? scene.prims.texts : scene.prims.symbols)
            .push_back(std::move(n));
    }
    return scene;
}

GroundTruthScene assemble_geo(const std::vector<FittedSegment>& segs,
                              const std::vector<FittedCircle>& circles,
                              const std::vector<DerivedPoint>& pts, int width, int height,
                              const ExtractionConfig& cfg) {
    GroundTruthScene scene;
    scene.width = width;
    scene.height = height;

    for (std::size_t i = 0; i < segs.size(); ++i) {
        GeoPrimitive l;
        l.id = "L" + std::to_string(i);
        l.cls = GeoClass::Line;
        l.pos = segs[i].pos;
        l.line_style = segs[i].style;
        l.mask = segment_mask(width, height, segs[i].pos, cfg.stroke_width);
        scene.prims.lines.push_back(std::move(l));
    }
    for (std::size_t k = 0; k < circles.size(); ++k) {
        const FittedCircle& f = circles[k];
        GeoPrimitive c;
        c.id = "C" + std::to_string(k);
        c.cls = GeoClass::Circle;
        c.pos = f.pos;
        c.circle_style = f.arc ? CircleStyle::Arc : CircleStyle::Complete;
        double a0 = 0, span = 7.0;
        if (f.arc) {
            a0 = std::atan2(f.arc_e0.y - f.pos.y, f.arc_e0.x - f.pos.x);
            span = ccw_offset(a0, std::atan2(f.arc_e1.y - f.pos.y, f.arc_e1.x - f.pos.x));
        }
        c.mask = circle_mask(width, height, f.pos, cfg.stroke_width, a0, span);
        scene.prims.circles.push_back(std::move(c));
    }
    for (std::size_t p = 0; p < pts.size(); ++p) {
        GeoPrimitive pt;
        pt.id = "P" + std::to_string(p);
        pt.cls = GeoClass::Point;
        pt.pos = PointPos{pts[p].xy.x, pts[p].xy.y};
        pt.point_kind = pts[p].kind;
        if (pts[p].kind == PointKind::Center || pts[p].kind == PointKind::Independent)
            pt.mask = disk_mask(width, height, pts[p].xy, cfg.dot_radius);
        scene.prims.points.push_back(std::move(pt));
    }

    // wire endpoint / centre / arc slots and points_on
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const DerivedPoint& dp = pts[p];
        const std::string pid = scene.prims.points[p].id;
        for (int enc : dp.endpoint_of)
            scene.prims.lines[static_cast<std::size_t>(enc / 2)].endpoints[enc % 2] = pid;
        for (int li : dp.on_lines) {
            auto& line = scene.prims.lines[static_cast<std::size_t>(li)];
            bool is_end = false;
            for (int enc : dp.endpoint_of)
                if (enc / 2 == li) is_end = true;
            if (!is_end) line.points_on.push_back(pid);
        }
        for (int enc : dp.arc_end_of)
            scene.prims.circles[static_cast<std::size_t>(enc / 2)].arc_endpoints[enc % 2] = pid;
        for (int ci : dp.center_of) scene.prims.circles[static_cast<std::size_t>(ci)].center_point = pid;
        for (int ci : dp.on_circles) {
            auto& circ = scene.prims.circles[static_cast<std::size_t>(ci)];
            bool is_arc_end = false;
            for (int enc : dp.arc_end_of)
                if (enc / 2 == ci) is_arc_end = true;
            if (!is_arc_end) circ.points_on.push_back(pid);
        }
    }
    return scene;
}

}  // namespace geodiag
