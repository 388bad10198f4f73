#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "geodiag/geom.hpp"

using namespace geodiag;

static std::mt19937 rng(12345);

static double uni(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

// dense sampling along the segment, independent of the closed-form rule
static double sampled_dist_point_line(const Vec2& p, const LinePos& l) {
    double best = 1e30;
    const int n = 100000;
    for (int i = 0; i <= n; ++i) {
        double t = double(i) / n;
        Vec2 q{l.x1 + t * (l.x2 - l.x1), l.y1 + t * (l.y2 - l.y1)};
        best = std::min(best, p.dist(q));
    }
    return best;
}

TEST_CASE("point to segment distance") {
    CHECK(dist_point_line({3, 4}, {0, 0, 10, 0}) == doctest::Approx(4.0));
    CHECK(dist_point_line({0, 0}, {0, -1, 0, 1}) == doctest::Approx(0.0));
    CHECK(dist_point_line({12, 5}, {0, 0, 10, 0}) == doctest::Approx(std::sqrt(29.0)));
    CHECK_THROWS_AS(dist_point_line({1, 1}, {5, 5, 5, 5}), std::invalid_argument);

    for (int k = 0; k < 60; ++k) {
        LinePos l{uni(-50, 50), uni(-50, 50), uni(-50, 50), uni(-50, 50)};
        if (l.a().dist(l.b()) < 1.0) continue;
        Vec2 p{uni(-80, 80), uni(-80, 80)};
        CHECK(dist_point_line(p, l) == doctest::Approx(sampled_dist_point_line(p, l)).epsilon(1e-6));
    }
}

TEST_CASE("point to circle distance") {
    CHECK(dist_point_circle({5, 0}, {0, 0, 5}) == doctest::Approx(0.0));
    CHECK(dist_point_circle({0, 0}, {0, 0, 5}) == doctest::Approx(5.0));
    CHECK(dist_point_circle({3, 4}, {0, 0, 2}) == doctest::Approx(3.0));

    // numeric minimization over ring points
    for (int k = 0; k < 40; ++k) {
        CirclePos c{uni(-30, 30), uni(-30, 30), uni(1, 40)};
        Vec2 p{uni(-80, 80), uni(-80, 80)};
        double best = 1e30;
        for (int i = 0; i < 200000; ++i) {
            double a = 2 * M_PI * i / 200000.0;
            best = std::min(best, p.dist({c.x + c.r * std::cos(a), c.y + c.r * std::sin(a)}));
        }
        CHECK(dist_point_circle(p, c) == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("distances are rigid-motion invariant") {
    for (int k = 0; k < 50; ++k) {
        double th = uni(0, 2 * M_PI);
        Vec2 t{uni(-100, 100), uni(-100, 100)};
        auto rot = [&](const Vec2& v) {
            return Vec2{v.x * std::cos(th) - v.y * std::sin(th) + t.x,
                        v.x * std::sin(th) + v.y * std::cos(th) + t.y};
        };
        Vec2 p{uni(-50, 50), uni(-50, 50)};
        LinePos l{uni(-50, 50), uni(-50, 50), uni(-50, 50), uni(-50, 50)};
        if (l.a().dist(l.b()) < 1e-6) continue;
        Vec2 pa = rot(p), la = rot(l.a()), lb = rot(l.b());
        CHECK(dist_point_line(pa, {la.x, la.y, lb.x, lb.y}) ==
              doctest::Approx(dist_point_line(p, l)).epsilon(1e-9));

        CirclePos c{uni(-50, 50), uni(-50, 50), uni(1, 30)};
        Vec2 ca = rot(c.center());
        CHECK(dist_point_circle(pa, {ca.x, ca.y, c.r}) ==
              doctest::Approx(dist_point_circle(p, c)).epsilon(1e-9));
    }
}

TEST_CASE("on-ray predicate") {
    CHECK(point_on_ray({0, 0}, {1, 0}, {5, 0}, 2));
    CHECK_FALSE(point_on_ray({0, 0}, {1, 0}, {-5, 0}, 2));
    CHECK(point_on_ray({0, 0}, {3, 4}, {6, 8.5}, 1));  // perpendicular offset 0.3
    CHECK_FALSE(point_on_ray({0, 0}, {3, 4}, {6, 8.5}, 0.2));
    CHECK_FALSE(point_on_ray({2, 3}, {5, 3}, {2, 3}, 1));  // a vertex never names its own arm
}

TEST_CASE("line intersections") {
    auto p = line_line_intersection({0, 0, 10, 0}, {5, -5, 5, 5});
    REQUIRE(p.has_value());
    CHECK(p->x == doctest::Approx(5));
    CHECK(p->y == doctest::Approx(0));
    CHECK_FALSE(line_line_intersection({0, 0, 10, 0}, {0, 1, 10, 1}).has_value());

    auto two = line_circle_intersections({-10, 0, 10, 0}, {0, 0, 5});
    CHECK(two.size() == 2);
    auto one = line_circle_intersections({-10, 5, 10, 5}, {0, 0, 5});
    CHECK(one.size() == 1);
    CHECK(line_circle_intersections({-10, 9, 10, 9}, {0, 0, 5}).empty());
}

TEST_CASE("segment angle folds into [0,90]") {
    CHECK(segment_angle_deg({0, 0, 1, 0}, {0, 0, 1, 1}) == doctest::Approx(45));
    CHECK(segment_angle_deg({0, 0, 1, 0}, {5, 5, -3, 5}) == doctest::Approx(0));
    CHECK(segment_angle_deg({0, 0, 1, 0}, {0, 0, 0, 7}) == doctest::Approx(90));
    double a = 100 * M_PI / 180;
    CHECK(segment_angle_deg({0, 0, 1, 0}, {0, 0, std::cos(a), std::sin(a)}) ==
          doctest::Approx(80));
}

TEST_CASE("box gap and iou") {
    CHECK(box_gap({0, 0, 10, 10}, {10, 0, 20, 10}) == doctest::Approx(0));
    CHECK(box_gap({0, 0, 10, 10}, {4, 4, 6, 6}) == doctest::Approx(0));
    CHECK(box_gap({0, 0, 10, 10}, {14, 0, 20, 10}) == doctest::Approx(4));
    CHECK(box_gap({0, 0, 10, 10}, {13, 14, 20, 20}) == doctest::Approx(5));  // 3-4-5
    CHECK(box_iou({0, 0, 10, 10}, {5, 0, 15, 10}) == doctest::Approx(1.0 / 3));
    CHECK(box_iou({0, 0, 10, 10}, {0, 0, 10, 10}) == doctest::Approx(1.0));
    CHECK(box_iou({0, 0, 10, 10}, {20, 20, 30, 30}) == doctest::Approx(0.0));
}

TEST_CASE("canonical line points") {
    std::vector<NamedPoint> pts{{"A", {0, 0}}, {"B", {5, 0}}, {"M", {2, 0}}};
    CHECK(canonical_line_points(pts) == std::pair<std::string, std::string>{"A", "B"});
    std::swap(pts[0], pts[1]);
    CHECK(canonical_line_points(pts) == std::pair<std::string, std::string>{"A", "B"});

    std::vector<NamedPoint> c{{"D", {-1, 0}}, {"A", {0, 0}}, {"C", {3, 0}}, {"B", {7, 0}}};
    CHECK(canonical_line_points(c) == std::pair<std::string, std::string>{"B", "D"});

    CHECK_THROWS(canonical_line_points({{"A", {0, 0}}}));

    // farthest-pair oracle on random collinear clouds, any input order
    for (int k = 0; k < 50; ++k) {
        Vec2 o{uni(-40, 40), uni(-40, 40)};
        double th = uni(0, 2 * M_PI);
        Vec2 d{std::cos(th), std::sin(th)};
        int n = 2 + int(uni(0, 6));
        std::vector<NamedPoint> cloud;
        std::set<int> used;
        for (int i = 0; i < n; ++i) {
            int t;
            do t = int(uni(-100, 100)); while (used.count(t));
            used.insert(t);
            cloud.push_back({std::string(1, char('A' + i)), o + d * double(t)});
        }
        std::string bi, bj;
        double best = -1;
        for (std::size_t i = 0; i < cloud.size(); ++i)
            for (std::size_t j = i + 1; j < cloud.size(); ++j) {
                double dd = cloud[i].xy.dist(cloud[j].xy);
                if (dd > best) {
                    best = dd;
                    bi = cloud[i].id;
                    bj = cloud[j].id;
                }
            }
        if (bi > bj) std::swap(bi, bj);
        std::shuffle(cloud.begin(), cloud.end(), rng);
        CHECK(canonical_line_points(cloud) == std::pair<std::string, std::string>{bi, bj});
    }
}

TEST_CASE("canonical angle") {
    Vec2 v{0, 0};
    auto t = canonical_angle("V", v, {{"A", {10, 0}}}, {{"B", {0, 10}}});
    CHECK(t == std::array<std::string, 3>{"A", "V", "B"});

    // farthest candidate per ray, then the lexicographically smaller triple
    auto u = canonical_angle("V", v, {{"A", {5, 0}}, {"C", {9, 0}}}, {{"B", {0, 4}}});
    CHECK(u == std::array<std::string, 3>{"B", "V", "C"});

    CHECK_THROWS(canonical_angle("V", v, {}, {{"B", {0, 4}}}));

    // idempotence over all naming variants of random wedges
    for (int k = 0; k < 60; ++k) {
        Vec2 vert{uni(-40, 40), uni(-40, 40)};
        double a1 = uni(0, 2 * M_PI), a2 = a1 + uni(0.5, 2.5);
        std::vector<NamedPoint> arm1, arm2;
        int n1 = 1 + int(uni(0, 3)), n2 = 1 + int(uni(0, 3));
        for (int i = 0; i < n1; ++i)
            arm1.push_back({std::string(1, char('A' + i)),
                            vert + Vec2{std::cos(a1), std::sin(a1)} * uni(5, 60)});
        for (int i = 0; i < n2; ++i)
            arm2.push_back({std::string(1, char('P' + i)),
                            vert + Vec2{std::cos(a2), std::sin(a2)} * uni(5, 60)});
        auto canon = canonical_angle("V", vert, arm1, arm2);
        CHECK(canonical_angle("V", vert, arm2, arm1) == canon);  // arm order free
        for (const auto& p1 : arm1)
            for (const auto& p2 : arm2) {
                CHECK(canonical_angle("V", vert, {p1}, {p2}).at(1) == "V");
            }
        // canonicalizing the canonical triple returns itself
        NamedPoint ca = *std::find_if(arm1.begin(), arm1.end(),
                                      [&](auto& p) { return p.id == canon[0] || p.id == canon[2]; });
        NamedPoint cb = *std::find_if(arm2.begin(), arm2.end(),
                                      [&](auto& p) { return p.id == canon[0] || p.id == canon[2]; });
        CHECK(canonical_angle("V", vert, {ca}, {cb}) == canon);
    }
}

TEST_CASE("rle masks round trip") {
    for (int k = 0; k < 30; ++k) {
        int w = 1 + int(uni(0, 40)), h = 1 + int(uni(0, 40));
        std::vector<std::uint8_t> px(std::size_t(w) * h);
        std::size_t ink = 0;
        for (auto& p : px) {
            p = uni(0, 1) < 0.3 ? 1 : 0;
            ink += p;
        }
        RleMask m = RleMask::encode(w, h, px);
        CHECK(m.decode() == px);
        CHECK(m.area() == ink);
    }
    RleMask empty = RleMask::encode(4, 4, std::vector<std::uint8_t>(16, 0));
    CHECK(empty.area() == 0);
    RleMask full = RleMask::encode(4, 4, std::vector<std::uint8_t>(16, 1));
    CHECK(full.area() == 16);
    CHECK(full.counts.front() == 0);  // leading background run is explicit
}

TEST_CASE("position validation") {
    CHECK_NOTHROW(validate_position(LinePos{0, 0, 5, 5}));
    CHECK_THROWS_AS(validate_position(LinePos{3, 3, 3, 3}), std::invalid_argument);
    CHECK_THROWS_AS(validate_position(CirclePos{0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_position(CirclePos{0, 0, -2}), std::invalid_argument);
    CHECK_THROWS_AS(validate_position(BoxPos{10, 0, 5, 5}), std::invalid_argument);
    CHECK_NOTHROW(validate_position(PointPos{1, 2}));
}

TEST_CASE("id prefixes name primitive kinds") {
    CHECK(kind_of_id("P0") == PrimKind::Point);
    CHECK(kind_of_id("L12") == PrimKind::Line);
    CHECK(kind_of_id("C1") == PrimKind::Circle);
    CHECK(kind_of_id("S3") == PrimKind::Symbol);
    CHECK(kind_of_id("T4") == PrimKind::Text);
    CHECK_THROWS(kind_of_id("X1"));
    CHECK_THROWS(kind_of_id(""));
}

TEST_CASE("class name round trips") {
    for (auto s : {"solid", "dash", "mixed"})
        CHECK(std::string(to_string(line_style_from_string(s))) == s);
    for (auto s : {"intersection", "tangent", "endpoint", "independent", "center"})
        CHECK(std::string(to_string(point_kind_from_string(s))) == s);
    for (auto s : {"perpendicular", "head", "head_len", "angle", "double angle", "triple angle",
                   "quad angle", "penta angle", "bar", "double bar", "triple bar", "quad bar",
                   "parallel", "double parallel", "triple parallel", "text"})
        CHECK(std::string(to_string(symbol_class_from_string(s))) == s);
    for (auto s : {"point", "line", "angle", "len", "degree", "area"})
        CHECK(std::string(to_string(text_class_from_string(s))) == s);
    for (auto t :
         {RelType::PointOnLine, RelType::PointOnCircle, RelType::CenterOfCircle,
          RelType::Text2Point, RelType::Text2Line, RelType::Text2Angle, RelType::Text2Degree,
          RelType::Text2Len, RelType::Text2Area, RelType::Perpendicular, RelType::AngleEquality,
          RelType::BarEquality, RelType::ParallelEquality, RelType::ArrowIndication})
        CHECK(rel_type_from_string(to_string(t)) == t);
}

TEST_CASE("admissibility table is exactly the schema") {
    using K = PrimKind;
    using R = RelType;
    auto expect = [](K s, K o, std::vector<R> want) {
        auto got = admissible_rel_types(s, o);
        CHECK(got == want);
    };
    expect(K::Point, K::Line, {R::PointOnLine});
    expect(K::Point, K::Circle, {R::PointOnCircle, R::CenterOfCircle});
    expect(K::Symbol, K::Point, {R::Perpendicular, R::AngleEquality});
    expect(K::Symbol, K::Line, {R::Perpendicular, R::BarEquality, R::ParallelEquality});
    expect(K::Symbol, K::Circle, {R::BarEquality});
    expect(K::Text, K::Point, {R::Text2Point, R::Text2Angle, R::Text2Degree});
    expect(K::Text, K::Line, {R::Text2Line, R::Text2Len});
    expect(K::Text, K::Circle, {R::Text2Degree, R::Text2Len, R::Text2Area});
    expect(K::Text, K::Symbol, {R::ArrowIndication});
    // everything else is out of schema
    std::set<std::pair<K, K>> in_schema{
        {K::Point, K::Line},  {K::Point, K::Circle}, {K::Symbol, K::Point},
        {K::Symbol, K::Line}, {K::Symbol, K::Circle}, {K::Text, K::Point},
        {K::Text, K::Line},   {K::Text, K::Circle},  {K::Text, K::Symbol}};
    for (K s : {K::Point, K::Line, K::Circle, K::Symbol, K::Text})
        for (K o : {K::Point, K::Line, K::Circle, K::Symbol, K::Text})
            if (!in_schema.count({s, o})) CHECK(admissible_rel_types(s, o).empty());
}

TEST_CASE("relation shape rejects kind violations") {
    PrimitiveSet prims;
    GeoPrimitive p;
    p.id = "P0";
    p.cls = GeoClass::Point;
    p.pos = PointPos{5, 5};
    prims.points.push_back(p);
    GeoPrimitive l;
    l.id = "L0";
    l.cls = GeoClass::Line;
    l.pos = LinePos{0, 0, 10, 0};
    prims.lines.push_back(l);

    Relation ok{"P0", {"L0"}, RelType::PointOnLine};
    CHECK(relation_shape_ok(ok, prims));

    std::string reason;
    Relation bad{"L0", {"P0"}, RelType::PointOnLine};
    CHECK_FALSE(relation_shape_ok(bad, prims, &reason));
    CHECK_FALSE(reason.empty());

    Relation missing{"P9", {"L0"}, RelType::PointOnLine};
    CHECK_FALSE(relation_shape_ok(missing, prims));

    Relation arity{"P0", {"L0", "L0"}, RelType::PointOnLine};
    CHECK_FALSE(relation_shape_ok(arity, prims));
}

TEST_CASE("relation sort key is deterministic") {
    Relation a{"P0", {"L0"}, RelType::PointOnLine};
    Relation b{"P0", {"L1"}, RelType::PointOnLine};
    Relation c{"P0", {"C0"}, RelType::PointOnCircle};
    CHECK(a.key() != b.key());
    CHECK(a.key() != c.key());
    CHECK(a.key() == Relation{a}.key());
}
