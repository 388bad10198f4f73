#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "geodiag/scene.hpp"
#include "geodiag/synth.hpp"

using namespace geodiag;
namespace fs = std::filesystem;

static GroundTruthScene tiny_scene() {
    GroundTruthScene s;
    s.id = "tiny";
    s.width = 64;
    s.height = 64;
    GeoPrimitive p;
    p.id = "P0";
    p.cls = GeoClass::Point;
    p.pos = PointPos{5, 6};
    p.point_kind = PointKind::Endpoint;
    s.prims.points.push_back(p);
    p.id = "P1";
    p.pos = PointPos{50, 6};
    s.prims.points.push_back(p);
    p.id = "P2";
    p.pos = PointPos{20, 6};
    p.point_kind = PointKind::Independent;
    s.prims.points.push_back(p);
    GeoPrimitive l;
    l.id = "L0";
    l.cls = GeoClass::Line;
    l.pos = LinePos{5, 6, 50, 6};
    l.endpoints = {"P0", "P1"};
    l.points_on = {"P2"};
    l.line_style = LineStyle::Dash;
    s.prims.lines.push_back(l);
    NonGeoPrimitive t;
    t.id = "T0";
    t.kind = NonGeoPrimitive::Kind::Text;
    t.box = {10, 12, 15, 19};
    t.text_class = TextClass::Point;
    t.content = "B";
    s.prims.texts.push_back(t);
    s.relations.push_back({"P2", {"L0"}, RelType::PointOnLine});
    s.relations.push_back({"T0", {"P1"}, RelType::Text2Point});
    return s;
}

TEST_CASE("annotation json round trips byte for byte") {
    GroundTruthScene s = tiny_scene();
    std::string j1 = scene_to_json(s);
    GroundTruthScene back = scene_from_json(j1);
    std::string j2 = scene_to_json(back);
    CHECK(j1 == j2);
    CHECK(back.prims.points.size() == 3);
    CHECK(back.prims.lines[0].line_style == LineStyle::Dash);
    CHECK(back.prims.lines[0].endpoints[0] == "P0");
    CHECK(back.prims.texts[0].content == "B");
    CHECK(back.relations.size() == 2);
}

TEST_CASE("annotation carries the documented field names") {
    std::string j = scene_to_json(tiny_scene());
    CHECK(j.find("\"subject\": \"P2\"") != std::string::npos);
    CHECK(j.find("\"type\": \"PointOnLine\"") != std::string::npos);
    CHECK(j.find("\"objects\"") != std::string::npos);
    CHECK(j.find("\"endpoints\"") != std::string::npos);
    CHECK(j.find("\"points_on\"") != std::string::npos);
    CHECK(j.find("\"style\": \"dash\"") != std::string::npos);
    CHECK(j.find("\"bbox\"") != std::string::npos);
    CHECK(j.find("\"kind\": \"endpoint\"") != std::string::npos);
}

TEST_CASE("sampled scenes round trip losslessly") {
    SceneConfig cfg;
    for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
        GroundTruthScene s = sample_scene(cfg, seed);
        std::string j1 = scene_to_json(s);
        CHECK(scene_to_json(scene_from_json(j1)) == j1);
    }
}

TEST_CASE("strict parsing rejects damage, lenient drops it") {
    GroundTruthScene s = tiny_scene();
    std::string good = scene_to_json(s);

    CHECK_THROWS_AS(scene_from_json("not json at all"), std::runtime_error);
    CHECK_THROWS_AS(scene_from_json("{}"), std::runtime_error);

    // a relation whose subject does not exist
    std::string bad = good;
    auto pos = bad.find("\"subject\": \"P2\"");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 15, "\"subject\": \"P9\"");
    CHECK_THROWS_AS(scene_from_json(bad), std::runtime_error);
    GroundTruthScene lenient = scene_from_json(bad, true);
    CHECK(lenient.relations.size() == 1);  // the broken one is gone

    // unknown class labels survive lenient mode as unknown
    std::string odd = good;
    pos = odd.find("\"point\"");
    odd.replace(pos, 7, "\"blurb\"");
    CHECK_THROWS_AS(scene_from_json(odd), std::runtime_error);
    GroundTruthScene loose = scene_from_json(odd, true);
    CHECK(loose.prims.texts[0].text_class == TextClass::Unknown);
}

TEST_CASE("relation order is deterministic") {
    std::vector<Relation> rels{
        {"T0", {"P1"}, RelType::Text2Point},
        {"P2", {"L0"}, RelType::PointOnLine},
        {"P1", {"L0"}, RelType::PointOnLine},
    };
    sort_relations(rels);
    std::vector<Relation> again = {rels[2], rels[0], rels[1]};
    sort_relations(again);
    CHECK(rels == again);
    CHECK(rels[0].subject == "P1");
}

TEST_CASE("mask sidecar round trips") {
    SceneConfig cfg;
    GroundTruthScene s = sample_scene(cfg, 21);
    std::string j = masks_to_json(s);

    GroundTruthScene stripped = scene_from_json(scene_to_json(s));
    for (const auto& p : stripped.prims.points) CHECK_FALSE(p.mask.has_value());
    masks_from_json(j, stripped);
    std::size_t with_mask = 0;
    for (const auto* v : {&stripped.prims.points, &stripped.prims.lines, &stripped.prims.circles})
        for (const auto& g : *v)
            if (g.mask) {
                ++with_mask;
                const auto* orig = s.prims.find_geo(g.id);
                REQUIRE(orig);
                CHECK(g.mask->counts == orig->mask->counts);
            }
    CHECK(with_mask > 0);
    CHECK(masks_to_json(stripped) == j);
}

TEST_CASE("file helpers write atomically and read back") {
    fs::path dir = fs::temp_directory_path() / "geodiag_io_test";
    fs::create_directories(dir);
    std::string p = (dir / "blob.txt").string();
    write_text_atomic(p, "alpha\nbeta\n");
    CHECK(read_text_file(p) == "alpha\nbeta\n");
    write_text_atomic(p, "gamma");
    CHECK(read_text_file(p) == "gamma");
    CHECK_FALSE(fs::exists(p + ".tmp"));
    CHECK_THROWS(read_text_file((dir / "missing.txt").string()));

    GroundTruthScene s = tiny_scene();
    std::string sp = (dir / "scene.json").string();
    write_scene_json(sp, s);
    CHECK(scene_to_json(read_scene_json(sp)) == scene_to_json(s));
    fs::remove_all(dir);
}
