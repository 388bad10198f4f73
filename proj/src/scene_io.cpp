#include "geodiag/scene.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace geodiag {

using ordered_json = nlohmann::ordered_json;

void sort_relations(std::vector<Relation>& rels) {
    std::sort(rels.begin(), rels.end(),
              [](const Relation& a, const Relation& b) { return a.key() < b.key(); });
}

namespace {

ordered_json box_to_json(const BoxPos& b) { return ordered_json::array({b.x1, b.y1, b.x2, b.y2}); }

BoxPos box_from_json(const ordered_json& j) {
    if (!j.is_array() || j.size() != 4) throw std::runtime_error("bbox must be [x1, y1, x2, y2]");
    BoxPos b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    validate_position(b);
    return b;
}

[[noreturn]] void bad(const std::string& msg) { throw std::runtime_error("annotation: " + msg); }

}  // namespace

std::string scene_to_json(const GroundTruthScene& scene) {
    ordered_json j;
    j["id"] = scene.id;
    j["width"] = scene.width;
    j["height"] = scene.height;

    j["points"] = ordered_json::array();
    for (const auto& p : scene.prims.points) {
        const auto& xy = p.as_point();
        j["points"].push_back({{"id", p.id},
                               {"x", xy.x},
                               {"y", xy.y},
                               {"kind", to_string(p.point_kind)}});
    }

    j["lines"] = ordered_json::array();
    for (const auto& l : scene.prims.lines) {
        j["lines"].push_back({{"id", l.id},
                              {"endpoints", {l.endpoints[0], l.endpoints[1]}},
                              {"points_on", l.points_on},
                              {"style", to_string(l.line_style)}});
    }

    j["circles"] = ordered_json::array();
    for (const auto& c : scene.prims.circles) {
        ordered_json cj = {{"id", c.id},
                           {"cx", c.as_circle().x},
                           {"cy", c.as_circle().y},
                           {"radius", c.as_circle().r},
                           {"center", c.center_point},
                           {"points_on", c.points_on},
                           {"arc", c.circle_style == CircleStyle::Arc}};
        if (c.circle_style == CircleStyle::Arc)
            cj["arc_endpoints"] = {c.arc_endpoints[0], c.arc_endpoints[1]};
        j["circles"].push_back(cj);
    }

    j["symbols"] = ordered_json::array();
    for (const auto& s : scene.prims.symbols)
        j["symbols"].push_back(
            {{"id", s.id}, {"class", to_string(s.symbol_class)}, {"bbox", box_to_json(s.box)}});

    j["texts"] = ordered_json::array();
    for (const auto& t : scene.prims.texts)
        j["texts"].push_back({{"id", t.id},
                              {"class", to_string(t.text_class)},
                              {"content", t.content},
                              {"bbox", box_to_json(t.box)}});

    j["relations"] = ordered_json::array();
    for (const auto& r : scene.relations)
        j["relations"].push_back(
            {{"subject", r.subject}, {"objects", r.objects}, {"type", to_string(r.type)}});

    j["propositions"] = scene.propositions;
    if (!scene.diagnostics.empty()) j["diagnostics"] = scene.diagnostics;

    return j.dump(2) + "\n";
}

GroundTruthScene scene_from_json(const std::string& text, bool lenient) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        bad(std::string("not valid json: ") + e.what());
    }

    GroundTruthScene scene;
    try {
        scene.id = j.at("id").get<std::string>();
        scene.width = j.at("width").get<int>();
        scene.height = j.at("height").get<int>();
        if (scene.width <= 0 || scene.height <= 0) bad("non-positive image dimensions");

        std::set<std::string> ids;
        auto claim_id = [&](const std::string& id) {
            if (id.empty()) bad("empty primitive id");
            if (!ids.insert(id).second) bad("duplicate id '" + id + "'");
        };

        for (const auto& pj : j.value("points", ordered_json::array())) {
            GeoPrimitive p;
            p.id = pj.at("id").get<std::string>();
            claim_id(p.id);
            p.cls = GeoClass::Point;
            p.pos = PointPos{pj.at("x").get<double>(), pj.at("y").get<double>()};
            try {
                p.point_kind = point_kind_from_string(pj.value("kind", "independent"));
            } catch (const std::invalid_argument& e) {
                if (!lenient) bad(e.what());
                p.point_kind = PointKind::Independent;
            }
            scene.prims.points.push_back(std::move(p));
        }

        auto point_xy = [&](const std::string& pid, const char* what) -> Vec2 {
            for (const auto& p : scene.prims.points)
                if (p.id == pid) return p.as_point().xy();
            bad(std::string(what) + " references unknown point '" + pid + "'");
        };

        for (const auto& lj : j.value("lines", ordered_json::array())) {
            GeoPrimitive l;
            l.id = lj.at("id").get<std::string>();
            claim_id(l.id);
            l.cls = GeoClass::Line;
            const auto& eps = lj.at("endpoints");
            if (!eps.is_array() || eps.size() != 2) bad("line endpoints must list two point ids");
            l.endpoints = {eps[0].get<std::string>(), eps[1].get<std::string>()};
            Vec2 a = point_xy(l.endpoints[0], "line"), b = point_xy(l.endpoints[1], "line");
            l.pos = LinePos{a.x, a.y, b.x, b.y};
            validate_position(l.pos);
            for (const auto& pid : lj.value("points_on", std::vector<std::string>{})) {
                point_xy(pid, "line points_on");
                l.points_on.push_back(pid);
            }
            try {
                l.line_style = line_style_from_string(lj.value("style", "solid"));
            } catch (const std::invalid_argument& e) {
                if (!lenient) bad(e.what());
                l.line_style = LineStyle::Solid;
            }
            scene.prims.lines.push_back(std::move(l));
        }

        for (const auto& cj : j.value("circles", ordered_json::array())) {
            GeoPrimitive c;
            c.id = cj.at("id").get<std::string>();
            claim_id(c.id);
            c.cls = GeoClass::Circle;
            c.center_point = cj.at("center").get<std::string>();
            // a circle does not need a named center point; the analytic
            // center is stored on its own
            if (!c.center_point.empty()) point_xy(c.center_point, "circle");
            c.pos = CirclePos{cj.at("cx").get<double>(), cj.at("cy").get<double>(),
                              cj.at("radius").get<double>()};
            validate_position(c.pos);
            for (const auto& pid : cj.value("points_on", std::vector<std::string>{})) {
                point_xy(pid, "circle points_on");
                c.points_on.push_back(pid);
            }
            if (cj.value("arc", false)) {
                c.circle_style = CircleStyle::Arc;
                const auto& eps = cj.at("arc_endpoints");
                if (!eps.is_array() || eps.size() != 2) bad("arc_endpoints must list two point ids");
                c.arc_endpoints = {eps[0].get<std::string>(), eps[1].get<std::string>()};
                point_xy(c.arc_endpoints[0], "arc");
                point_xy(c.arc_endpoints[1], "arc");
            }
            scene.prims.circles.push_back(std::move(c));
        }

        for (const auto& sj : j.value("symbols", ordered_json::array())) {
            NonGeoPrimitive s;
            s.id = sj.at("id").get<std::string>();
            claim_id(s.id);
            s.kind = NonGeoPrimitive::Kind::Symbol;
            try {
                s.symbol_class = symbol_class_from_string(sj.at("class").get<std::string>());
            } catch (const std::invalid_argument& e) {
                if (!lenient) bad(e.what());
                s.symbol_class = SymbolClass::Unknown;
            }
            s.box = box_from_json(sj.at("bbox"));
            scene.prims.symbols.push_back(std::move(s));
        }

        for (const auto& tj : j.value("texts", ordered_json::array())) {
            NonGeoPrimitive t;
            t.id = tj.at("id").get<std::string>();
            claim_id(t.id);
            t.kind = NonGeoPrimitive::Kind::Text;
            try {
                t.text_class = text_class_from_string(tj.at("class").get<std::string>());
            } catch (const std::invalid_argument& e) {
                if (!lenient) bad(e.what());
                t.text_class = TextClass::Unknown;
            }
            t.content = tj.value("content", "");
            t.box = box_from_json(tj.at("bbox"));
            scene.prims.texts.push_back(std::move(t));
        }

        for (const auto& rj : j.value("relations", ordered_json::array())) {
            Relation r;
            r.subject = rj.at("subject").get<std::string>();
            r.objects = rj.at("objects").get<std::vector<std::string>>();
            try {
                r.type = rel_type_from_string(rj.at("type").get<std::string>());
            } catch (const std::invalid_argument& e) {
                if (!lenient) bad(e.what());
                continue;
            }
            std::string reason;
            if (!relation_shape_ok(r, scene.prims, &reason)) {
                if (!lenient) bad("relation " + r.key() + ": " + reason);
                continue;
            }
            scene.relations.push_back(std::move(r));
        }

        scene.propositions = j.value("propositions", std::vector<std::string>{});
        scene.diagnostics = j.value("diagnostics", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        bad(std::string("schema mismatch: ") + e.what());
    }
    return scene;
}

// ---------------------------------------------------------------------------

std::string masks_to_json(const GroundTruthScene& scene) {
    ordered_json j;
    j["width"] = scene.width;
    j["height"] = scene.height;
    ordered_json masks = ordered_json::object();
    auto add = [&](const GeoPrimitive& g) {
        if (g.mask) masks[g.id] = g.mask->counts;
    };
    for (const auto& p : scene.prims.points) add(p);
    for (const auto& l : scene.prims.lines) add(l);
    for (const auto& c : scene.prims.circles) add(c);
    j["masks"] = masks;
    return j.dump() + "\n";
}

void masks_from_json(const std::string& text, GroundTruthScene& scene) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("masks: not valid json: ") + e.what());
    }
    int w = j.at("width").get<int>();
    int h = j.at("height").get<int>();
    for (const auto& [id, counts] : j.at("masks").items()) {
        GeoPrimitive* g = scene.prims.find_geo(id);
        if (!g) throw std::runtime_error("masks: unknown geo id '" + id + "'");
        RleMask m;
        m.width = w;
        m.height = h;
        m.counts = counts.get<std::vector<std::uint32_t>>();
        std::uint64_t total = 0;
        for (auto c : m.counts) total += c;
        if (total != static_cast<std::uint64_t>(w) * h)
            throw std::runtime_error("masks: counts for '" + id + "' do not cover the image");
        g->mask = std::move(m);
    }
}

// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void write_text_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + path);
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("short write: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot move temp file into place: " + path);
}

void write_scene_json(const std::string& path, const GroundTruthScene& scene) {
    write_text_atomic(path, scene_to_json(scene));
}

GroundTruthScene read_scene_json(const std::string& path, bool lenient) {
    try {
        return scene_from_json(read_text_file(path), lenient);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_masks_json(const std::string& path, const GroundTruthScene& scene) {
    write_text_atomic(path, masks_to_json(scene));
}

void read_masks_json(const std::string& path, GroundTruthScene& scene) {
    try {
        masks_from_json(read_text_file(path), scene);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace geodiag
