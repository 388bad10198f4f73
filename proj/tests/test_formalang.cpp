#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "geodiag/formalang.hpp"

using namespace geodiag;

static PropNode atom(const std::string& s) { return PropNode{s, {}}; }

TEST_CASE("parsing builds the expected trees") {
    PropNode p = parse_proposition("Perpendicular(Line(A, B), Line(C, D))");
    REQUIRE(p.head == "Perpendicular");
    REQUIRE(p.args.size() == 2);
    CHECK(p.args[0] == PropNode{"Line", {atom("A"), atom("B")}});
    CHECK(p.args[1] == PropNode{"Line", {atom("C"), atom("D")}});

    CHECK(parse_proposition("Line(A)") == PropNode{"Line", {atom("A")}});
    CHECK(parse_proposition("Angle(x)") == PropNode{"Angle", {atom("x")}});
    CHECK(parse_proposition("Equals(LengthOf(Line(A, B)), 12.5)").args[1].head == "12.5");

    // whitespace is free inside the expression
    CHECK(parse_proposition("Perpendicular( Line(A,B) ,  Line(C,D) )") == p);
}

TEST_CASE("arity and syntax violations carry positions") {
    CHECK_THROWS_AS(parse_proposition("Angle(A, B)"), ParseError);
    CHECK_THROWS_AS(parse_proposition("Line()"), ParseError);
    CHECK_THROWS_AS(parse_proposition("Line(A, B, C)"), ParseError);
    CHECK_THROWS_AS(parse_proposition("Point(A"), ParseError);
    CHECK_THROWS_AS(parse_proposition("MeasureOf(Line(A, B))"), ParseError);

    try {
        parse_propositions("Point(A)\nAngle(A, B)\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.col >= 1);
    }

    std::vector<std::string> errs;
    PropositionSet ok = parse_propositions_lenient("Point(A)\njunk((\nPoint(B)\n", &errs);
    CHECK(ok.props.size() == 2);
    CHECK(errs.size() == 1);
}

TEST_CASE("serialization is exact and stable") {
    PropNode p = parse_proposition("Equals(MeasureOf(Angle(A, B, C)), 30)");
    CHECK(serialize(p) == "Equals(MeasureOf(Angle(A, B, C)), 30)");
    CHECK(parse_proposition(serialize(p)) == p);
}

TEST_CASE("round trip over random template instances") {
    std::mt19937 rng(7);
    auto name = [&] { return std::string(1, char('A' + rng() % 26)); };
    auto num = [&] { return std::to_string(10 + int(rng() % 90)); };
    for (int k = 0; k < 200; ++k) {
        PropositionSet s;
        auto line = [&] { return PropNode{"Line", {atom(name()), atom(name())}}; };
        auto angle = [&] {
            return PropNode{"Angle", {atom(name()), atom(name()), atom(name())}};
        };
        s.props.push_back(PropNode{"Point", {atom(name())}});
        s.props.push_back(PropNode{"Line", {atom(name())}});
        s.props.push_back(PropNode{"Circle", {atom(name()), atom("radius_0")}});
        s.props.push_back(PropNode{"Arc", {atom("A"), atom("B")}});
        s.props.push_back(PropNode{"Arc", {atom("A"), atom("M"), atom("B")}});
        s.props.push_back(PropNode{"PointLiesOnLine", {atom(name()), line()}});
        s.props.push_back(
            PropNode{"PointLiesOnCircle", {atom(name()), PropNode{"Circle", {atom(name()), atom("radius_1")}}}});
        s.props.push_back(PropNode{"Perpendicular", {line(), line()}});
        s.props.push_back(PropNode{"Parallel", {line(), line()}});
        s.props.push_back(PropNode{"Equals", {PropNode{"MeasureOf", {angle()}}, atom(num())}});
        s.props.push_back(PropNode{"Equals", {PropNode{"LengthOf", {line()}}, atom(num())}});
        s.props.push_back(PropNode{"Equals",
                                   {PropNode{"LengthOf", {PropNode{"Arc", {atom("C"), atom("D")}}}},
                                    PropNode{"LengthOf", {line()}}}});
        s.sort_and_dedup();
        CHECK(parse_propositions(serialize(s)) == s);
    }
}

TEST_CASE("proposition group classification") {
    auto g = [](const char* s) { return classify_prop(parse_proposition(s)); };
    CHECK(g("Point(A)") == PropGroup::GeoShape);
    CHECK(g("Line(A, B)") == PropGroup::GeoShape);
    CHECK(g("Circle(O, radius_0)") == PropGroup::GeoShape);
    CHECK(g("Arc(A, B)") == PropGroup::GeoShape);
    CHECK(g("Angle(A, B, C)") == PropGroup::GeoShape);
    CHECK(g("PointLiesOnLine(M, Line(A, B))") == PropGroup::Geo2Geo);
    CHECK(g("PointLiesOnCircle(M, Circle(O, radius_0))") == PropGroup::Geo2Geo);
    CHECK(g("Line(m)") == PropGroup::Text2Geo);
    CHECK(g("Angle(x)") == PropGroup::Text2Geo);
    CHECK(g("Equals(MeasureOf(Angle(A, B, C)), 30)") == PropGroup::Text2Geo);
    CHECK(g("Equals(LengthOf(Line(A, B)), 7)") == PropGroup::Text2Geo);
    CHECK(g("Equals(MeasureOf(Angle(A, B, C)), MeasureOf(Angle(x)))") == PropGroup::Text2Geo);
    CHECK(g("Perpendicular(Line(A, B), Line(C, D))") == PropGroup::Sym2Geo);
    CHECK(g("Parallel(Line(A, B), Line(C, D))") == PropGroup::Sym2Geo);
    CHECK(g("Equals(MeasureOf(Angle(A, B, C)), MeasureOf(Angle(D, E, F)))") == PropGroup::Sym2Geo);
    CHECK(g("Equals(LengthOf(Line(A, B)), LengthOf(Line(C, D)))") == PropGroup::Sym2Geo);
}

TEST_CASE("set ordering is group then lexicographic, duplicates dropped") {
    PropositionSet s = parse_propositions(
        "Perpendicular(Line(A, B), Line(C, D))\n"
        "Point(B)\n"
        "Equals(MeasureOf(Angle(A, B, C)), 30)\n"
        "Point(A)\n"
        "PointLiesOnLine(M, Line(A, B))\n"
        "Point(A)\n");
    s.sort_and_dedup();
    REQUIRE(s.props.size() == 5);
    CHECK(serialize(s.props[0]) == "Point(A)");
    CHECK(serialize(s.props[1]) == "Point(B)");
    CHECK(serialize(s.props[2]) == "PointLiesOnLine(M, Line(A, B))");
    CHECK(serialize(s.props[3]) == "Equals(MeasureOf(Angle(A, B, C)), 30)");
    CHECK(serialize(s.props[4]) == "Perpendicular(Line(A, B), Line(C, D))");
}

static GeoContext ray_context() {
    GeoContext ctx;
    ctx.points["R"] = {0, 0};
    ctx.points["P"] = {0, 10};
    ctx.points["Q"] = {5, 0};
    ctx.points["N"] = {9, 0};
    ctx.points["A"] = {0, 0};
    ctx.points["B"] = {10, 0};
    ctx.points["M"] = {4, 0};
    ctx.points["C"] = {0, 5};
    ctx.points["D"] = {10, 5};
    return ctx;
}

TEST_CASE("canonicalization rewrites to extreme and farthest points") {
    GeoContext ctx = ray_context();

    PropNode a1 = canonicalize(parse_proposition("Angle(P, R, Q)"), ctx);
    PropNode a2 = canonicalize(parse_proposition("Angle(P, R, N)"), ctx);
    CHECK(a1 == a2);
    CHECK(canonicalize(a1, ctx) == a1);  // idempotent
    CHECK(equivalent(parse_proposition("Angle(P, R, Q)"), parse_proposition("Angle(P, R, N)"), ctx));

    // line names move to the extreme pair
    CHECK(canonicalize(parse_proposition("Line(M, B)"), ctx) ==
          parse_proposition("Line(A, B)"));

    // symmetric predicate arguments sort
    PropNode e = canonicalize(
        parse_proposition("Equals(LengthOf(Line(C, D)), LengthOf(Line(A, B)))"), ctx);
    CHECK(serialize(e) == "Equals(LengthOf(Line(A, B)), LengthOf(Line(C, D)))");
    CHECK(equivalent(parse_proposition("Perpendicular(Line(A, B), Line(C, D))"),
                     parse_proposition("Perpendicular(Line(C, D), Line(A, B))"), ctx));

    // names outside the context survive untouched
    CHECK(canonicalize(parse_proposition("Point(Z)"), ctx) == parse_proposition("Point(Z)"));

    CHECK_FALSE(equivalent(parse_proposition("Point(A)"), parse_proposition("Point(B)"), ctx));
}

TEST_CASE("leaf renaming") {
    std::map<std::string, std::string> m{{"P0", "A"}, {"P1", "B"}};
    PropNode p = parse_proposition("PointLiesOnLine(P2, Line(P0, P1))");
    CHECK(serialize(rename_leaves(p, m)) == "PointLiesOnLine(P2, Line(A, B))");
}

static PrimitiveSet demo_prims() {
    PrimitiveSet prims;
    auto pt = [&](const char* id, double x, double y) {
        GeoPrimitive p;
        p.id = id;
        p.cls = GeoClass::Point;
        p.pos = PointPos{x, y};
        prims.points.push_back(p);
    };
    pt("P0", 0, 0);
    pt("P1", 100, 0);
    pt("P2", 40, 0);
    pt("P3", 0, 80);
    GeoPrimitive l;
    l.id = "L0";
    l.cls = GeoClass::Line;
    l.pos = LinePos{0, 0, 100, 0};
    l.endpoints = {"P0", "P1"};
    l.points_on = {"P2"};
    prims.lines.push_back(l);
    GeoPrimitive l2 = l;
    l2.id = "L1";
    l2.pos = LinePos{0, 0, 0, 80};
    l2.endpoints = {"P0", "P3"};
    l2.points_on = {};
    prims.lines.push_back(l2);
    NonGeoPrimitive t;
    t.id = "T0";
    t.kind = NonGeoPrimitive::Kind::Text;
    t.box = {10, 10, 20, 17};
    t.text_class = TextClass::Degree;
    t.content = "30";
    prims.texts.push_back(t);
    return prims;
}

TEST_CASE("generation instantiates the templates") {
    PrimitiveSet prims = demo_prims();
    std::vector<Relation> rels{
        {"P2", {"L0"}, RelType::PointOnLine},
        {"T0", {"P3", "P0", "P1"}, RelType::Text2Degree},
    };
    PropositionSet set = generate_propositions(prims, rels);
    std::set<std::string> lines;
    for (const auto& p : set.props) lines.insert(serialize(p));

    CHECK(lines.count("PointLiesOnLine(P2, Line(P0, P1))"));
    CHECK(lines.count("Equals(30, MeasureOf(Angle(P1, P0, P3)))"));
    CHECK(lines.count("Point(P0)"));
    CHECK(lines.count("Line(P0, P1)"));

    // area relations produce nothing
    PrimitiveSet p2 = demo_prims();
    p2.texts[0].text_class = TextClass::Area;
    std::vector<Relation> area{{"T0", {"C0"}, RelType::Text2Area}};
    PropositionSet s2 = generate_propositions(p2, {});
    PropositionSet s3 = generate_propositions(p2, area);
    CHECK(serialize(s2) == serialize(s3));

    // no duplicates after canonicalization of the generated set
    GeoContext ctx = make_context(prims, rels);
    std::set<std::string> canon;
    for (const auto& p : set.props) canon.insert(serialize(canonicalize(p, ctx)));
    CHECK(canon.size() == set.props.size());
}

TEST_CASE("context names points by their labels") {
    PrimitiveSet prims = demo_prims();
    NonGeoPrimitive lbl;
    lbl.id = "T1";
    lbl.kind = NonGeoPrimitive::Kind::Text;
    lbl.box = {0, 5, 8, 12};
    lbl.text_class = TextClass::Point;
    lbl.content = "A";
    prims.texts.push_back(lbl);
    std::vector<Relation> rels{{"T1", {"P0"}, RelType::Text2Point}};

    auto names = proposition_point_names(prims, rels);
    CHECK(names.at("P0") == "A");
    CHECK(names.at("P1") == "P1");

    GeoContext ctx = make_context(prims, rels);
    CHECK(ctx.points.count("A"));
    CHECK_FALSE(ctx.points.count("P0"));
    CHECK(ctx.points.count("P1"));

    PropositionSet set = generate_propositions(prims, rels);
    std::set<std::string> lines;
    for (const auto& p : set.props) lines.insert(serialize(p));
    CHECK(lines.count("Point(A)"));
    CHECK(lines.count("Line(A, P1)"));
}
