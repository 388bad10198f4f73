#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "geodiag/formalang.hpp"
#include "geodiag/synth.hpp"

using namespace geodiag;

static SceneConfig quiet_config() {
    SceneConfig cfg;
    cfg.w_perp = cfg.w_angle = cfg.w_bar = cfg.w_parallel = cfg.w_arrow = 0;
    cfg.w_point_label = cfg.w_line_label = cfg.w_degree = cfg.w_len = 0;
    cfg.w_area = cfg.w_angle_label = 0;
    cfg.w_dash = cfg.w_mixed = cfg.w_arc = cfg.w_center_dot = cfg.w_free_point = 0;
    return cfg;
}

TEST_CASE("same config and seed reproduce the scene bit for bit") {
    SceneConfig cfg;
    for (std::uint64_t seed : {3u, 77u}) {
        GrayImage a_img, b_img;
        GroundTruthScene a = sample_scene(cfg, seed, &a_img);
        GroundTruthScene b = sample_scene(cfg, seed, &b_img);
        CHECK(scene_to_json(a) == scene_to_json(b));
        CHECK(a_img.pixels == b_img.pixels);
    }
    GroundTruthScene a = sample_scene(cfg, 3);
    GroundTruthScene b = sample_scene(cfg, 4);
    CHECK(scene_to_json(a) != scene_to_json(b));
}

TEST_CASE("an everything-off config yields an empty scene") {
    SceneConfig cfg = quiet_config();
    cfg.min_lines = cfg.max_lines = 0;
    cfg.min_circles = cfg.max_circles = 0;
    GroundTruthScene s = sample_scene(cfg, 5);
    CHECK(s.prims.points.empty());
    CHECK(s.prims.lines.empty());
    CHECK(s.prims.circles.empty());
    CHECK(s.prims.symbols.empty());
    CHECK(s.prims.texts.empty());
    CHECK(s.relations.empty());
    CHECK(s.propositions.empty());
}

TEST_CASE("bare line scenes carry only structural relations") {
    SceneConfig cfg = quiet_config();
    cfg.min_lines = cfg.max_lines = 3;
    cfg.min_circles = cfg.max_circles = 0;
    GroundTruthScene s = sample_scene(cfg, 7);
    CHECK(s.prims.lines.size() == 3);
    CHECK(s.prims.points.size() >= 3);  // two ends each, maybe shared
    CHECK(s.prims.circles.empty());
    CHECK(s.prims.symbols.empty());
    CHECK(s.prims.texts.empty());
    for (const auto& r : s.relations)
        CHECK(rel_group(r.type) == RelGroup::Geo2Geo);
}

TEST_CASE("every emitted relation is geometrically grounded") {
    SceneConfig cfg;
    AdmissibilityTol tol;
    AdmissibilityTol tight;
    tight.on_line = 0.5;
    tight.on_circle = 0.5;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        GroundTruthScene s = sample_scene(cfg, seed);
        for (const auto& r : s.relations) {
            CHECK(relation_shape_ok(r, s.prims));
            CHECK(relation_geometry_ok(r, s.prims, tol));
            if (rel_group(r.type) == RelGroup::Geo2Geo)
                CHECK(relation_geometry_ok(r, s.prims, tight));
        }
    }
}

TEST_CASE("the corpus exercises the whole vocabulary") {
    SceneConfig cfg;
    cfg.min_lines = 2;
    cfg.max_circles = 2;
    std::set<SymbolClass> syms;
    std::set<TextClass> texts;
    std::set<RelType> rels;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        GroundTruthScene s = sample_scene(cfg, seed);
        for (const auto& g : s.prims.symbols) syms.insert(g.symbol_class);
        for (const auto& t : s.prims.texts) texts.insert(t.text_class);
        for (const auto& r : s.relations) rels.insert(r.type);
    }
    CHECK(syms.size() == 15);  // every mark except the text pseudo-class
    for (auto tc : {TextClass::Point, TextClass::Line, TextClass::Angle, TextClass::Degree,
                    TextClass::Len, TextClass::Area})
        CHECK(texts.count(tc));
    CHECK(rels.size() == 14);
}

TEST_CASE("stored propositions match a fresh generation") {
    SceneConfig cfg;
    for (std::uint64_t seed : {2u, 19u, 240u}) {
        GroundTruthScene s = sample_scene(cfg, seed);
        auto props = generate_propositions(s.prims, s.relations);
        std::vector<std::string> expect;
        expect.reserve(props.props.size());
        for (const auto& p : props.props) expect.push_back(serialize(p));
        CHECK(s.propositions == expect);
    }
}

TEST_CASE("impossible layouts fail with a named constraint") {
    SceneConfig cfg;
    cfg.width = 64;
    cfg.height = 64;
    cfg.min_lines = cfg.max_lines = 32;
    try {
        sample_scene(cfg, 1);
        FAIL("expected SynthError");
    } catch (const SynthError& e) {
        CHECK(std::string(e.what()).size() > 0);
    }
}

TEST_CASE("config validation names the offending field") {
    SceneConfig cfg;
    cfg.min_lines = 5;
    cfg.max_lines = 2;
    try {
        validate_config(cfg);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    cfg = SceneConfig{};
    cfg.width = 0;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
    cfg = SceneConfig{};
    cfg.w_bar = -1;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
    CHECK_NOTHROW(validate_config(SceneConfig{}));
}

TEST_CASE("config digest tracks fields, not the seed") {
    SceneConfig a;
    std::string d = config_digest(a);
    CHECK(d.size() == 16);
    CHECK(d.find_first_not_of("0123456789abcdef") == std::string::npos);
    SceneConfig b = a;
    b.seed = 999;
    CHECK(config_digest(b) == d);
    SceneConfig c = a;
    c.w_bar += 0.01;
    CHECK(config_digest(c) != d);
    SceneConfig e = a;
    e.max_lines += 1;
    CHECK(config_digest(e) != d);
}
