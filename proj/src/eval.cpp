#include "geodiag/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "geodiag/assignment.hpp"
#include "geodiag/formalang.hpp"

namespace geodiag {

namespace {

using json = nlohmann::json;

const SymbolClass kGlyphClasses[] = {
    SymbolClass::Angle,         SymbolClass::DoubleAngle, SymbolClass::TripleAngle,
    SymbolClass::QuadAngle,     SymbolClass::PentaAngle,  SymbolClass::Bar,
    SymbolClass::DoubleBar,     SymbolClass::TripleBar,   SymbolClass::QuadBar,
    SymbolClass::Parallel,      SymbolClass::DoubleParallel, SymbolClass::TripleParallel,
    SymbolClass::Perpendicular, SymbolClass::Head,        SymbolClass::HeadLen,
};

}  // namespace

PRF prf_from_counts(int tp, int fp, int fn) {
    PRF r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    if (tp + fp > 0) r.precision = double(tp) / (tp + fp);
    if (tp + fn > 0) r.recall = double(tp) / (tp + fn);
    if (r.precision + r.recall > 0)
        r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

MatchResult match_instances(const std::vector<std::string>& pred_ids,
                            const std::vector<std::string>& gt_ids,
                            const std::function<double(std::size_t, std::size_t)>& cost,
                            double threshold) {
    std::vector<std::vector<double>> m(pred_ids.size(), std::vector<double>(gt_ids.size(), 0.0));
    for (std::size_t i = 0; i < pred_ids.size(); ++i)
        for (std::size_t j = 0; j < gt_ids.size(); ++j) m[i][j] = cost(i, j);
    AssignmentResult a = assign_with_threshold(m, threshold);

    MatchResult res;
    for (std::size_t i = 0; i < pred_ids.size(); ++i) {
        if (a.row_match[i] >= 0)
            res.pairs.push_back({pred_ids[i], gt_ids[static_cast<std::size_t>(a.row_match[i])],
                                 m[i][static_cast<std::size_t>(a.row_match[i])]});
        else
            res.unmatched_pred.push_back(pred_ids[i]);
    }
    for (std::size_t j = 0; j < gt_ids.size(); ++j)
        if (a.col_match[j] < 0) res.unmatched_gt.push_back(gt_ids[j]);
    std::sort(res.pairs.begin(), res.pairs.end(),
              [](const MatchResult::Pair& x, const MatchResult::Pair& y) { return x.pred < y.pred; });
    std::sort(res.unmatched_pred.begin(), res.unmatched_pred.end());
    std::sort(res.unmatched_gt.begin(), res.unmatched_gt.end());
    return res;
}

double line_cost(const LinePos& a, const LinePos& b) {
    double straight = std::max(a.a().dist(b.a()), a.b().dist(b.b()));
    double crossed = std::max(a.a().dist(b.b()), a.b().dist(b.a()));
    return std::min(straight, crossed);
}

double circle_cost(const CirclePos& a, const CirclePos& b) {
    return a.center().dist(b.center()) + std::abs(a.r - b.r);
}

namespace {

MatchResult match_geo_class(const std::vector<const GeoPrimitive*>& pred,
                            const std::vector<const GeoPrimitive*>& gt, GeoClass cls,
                            double threshold) {
    std::vector<std::string> pids, gids;
    for (const auto* p : pred) pids.push_back(p->id);
    for (const auto* g : gt) gids.push_back(g->id);
    auto cost = [&](std::size_t i, std::size_t j) {
        switch (cls) {
            case GeoClass::Point:
                return pred[i]->as_point().xy().dist(gt[j]->as_point().xy());
            case GeoClass::Line:
                return line_cost(pred[i]->as_line(), gt[j]->as_line());
            case GeoClass::Circle:
                return circle_cost(pred[i]->as_circle(), gt[j]->as_circle());
        }
        return 1e300;
    };
    return match_instances(pids, gids, cost, threshold);
}

std::vector<const GeoPrimitive*> of_class(const PrimitiveSet& s, GeoClass cls) {
    std::vector<const GeoPrimitive*> out;
    const auto& v = cls == GeoClass::Point   ? s.points
                    : cls == GeoClass::Line  ? s.lines
                                             : s.circles;
    for (const auto& p : v) out.push_back(&p);
    return out;
}

}  // namespace

ClassPRF eval_manner1(const PrimitiveSet& pred, const PrimitiveSet& gt, double threshold) {
    ClassPRF out;
    for (GeoClass cls : {GeoClass::Point, GeoClass::Line, GeoClass::Circle}) {
        auto p = of_class(pred, cls);
        auto g = of_class(gt, cls);
        MatchResult m = match_geo_class(p, g, cls, threshold);
        out[to_string(cls)] = prf_from_counts(static_cast<int>(m.pairs.size()),
                                              static_cast<int>(m.unmatched_pred.size()),
                                              static_cast<int>(m.unmatched_gt.size()));
    }
    return out;
}

namespace {

struct MaskView {
    std::vector<std::uint8_t> px;
    int w = 0, h = 0;
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // ink bbox, empty when x1 < x0
    std::size_t area = 0;

    static MaskView from(const RleMask& m) {
        MaskView v;
        v.w = m.width;
        v.h = m.height;
        v.px = m.decode();
        v.x0 = v.w;
        v.y0 = v.h;
        for (int y = 0; y < v.h; ++y)
            for (int x = 0; x < v.w; ++x)
                if (v.px[static_cast<std::size_t>(y) * v.w + x]) {
                    v.x0 = std::min(v.x0, x);
                    v.y0 = std::min(v.y0, y);
                    v.x1 = std::max(v.x1, x);
                    v.y1 = std::max(v.y1, y);
                    ++v.area;
                }
        return v;
    }
};

double mask_iou(const MaskView& a, const MaskView& b) {
    if (a.w != b.w || a.h != b.h)
        throw std::invalid_argument("mask dimensions differ");
    int x0 = std::max(a.x0, b.x0), x1 = std::min(a.x1, b.x1);
    int y0 = std::max(a.y0, b.y0), y1 = std::min(a.y1, b.y1);
    std::size_t inter = 0;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            std::size_t at = static_cast<std::size_t>(y) * a.w + x;
            if (a.px[at] && b.px[at]) ++inter;
        }
    std::size_t uni = a.area + b.area - inter;
    return uni > 0 ? double(inter) / double(uni) : 0.0;
}

PRF overlap_prf(const std::vector<const GeoPrimitive*>& pred,
                const std::vector<const GeoPrimitive*>& gt, double iou_needed) {
    std::vector<MaskView> pv, gv;
    std::vector<std::string> pids, gids;
    for (const auto* p : pred) {
        pv.push_back(p->mask ? MaskView::from(*p->mask) : MaskView{});
        pids.push_back(p->id);
    }
    for (const auto* g : gt) {
        gv.push_back(g->mask ? MaskView::from(*g->mask) : MaskView{});
        gids.push_back(g->id);
    }
    auto cost = [&](std::size_t i, std::size_t j) {
        const MaskView& a = pv[i];
        const MaskView& b = gv[j];
        if (a.px.empty() || b.px.empty()) return 2.0;
        if (a.x1 < a.x0 || b.x1 < b.x0) return 2.0;
        if (a.x1 < b.x0 || b.x1 < a.x0 || a.y1 < b.y0 || b.y1 < a.y0) return 2.0;
        return 1.0 - mask_iou(a, b);
    };
    MatchResult m = match_instances(pids, gids, cost, 1.0 - iou_needed);
    return prf_from_counts(static_cast<int>(m.pairs.size()),
                           static_cast<int>(m.unmatched_pred.size()),
                           static_cast<int>(m.unmatched_gt.size()));
}

PRF box_prf(const std::vector<const NonGeoPrimitive*>& pred,
            const std::vector<const NonGeoPrimitive*>& gt, double iou_needed) {
    std::vector<std::string> pids, gids;
    for (const auto* p : pred) pids.push_back(p->id);
    for (const auto* g : gt) gids.push_back(g->id);
    auto cost = [&](std::size_t i, std::size_t j) {
        return 1.0 - box_iou(pred[i]->box, gt[j]->box);
    };
    MatchResult m = match_instances(pids, gids, cost, 1.0 - iou_needed);
    return prf_from_counts(static_cast<int>(m.pairs.size()),
                           static_cast<int>(m.unmatched_pred.size()),
                           static_cast<int>(m.unmatched_gt.size()));
}

std::vector<const NonGeoPrimitive*> glyphs_of(const PrimitiveSet& s, SymbolClass cls) {
    std::vector<const NonGeoPrimitive*> out;
    for (const auto& p : s.symbols)
        if (p.symbol_class == cls) out.push_back(&p);
    return out;
}

}  // namespace

ClassPRF eval_manner2(const PrimitiveSet& pred, const PrimitiveSet& gt, double geo_iou,
                      double nongeo_iou) {
    ClassPRF out;
    for (GeoClass cls : {GeoClass::Point, GeoClass::Line, GeoClass::Circle}) {
        auto p = of_class(pred, cls);
        auto g = of_class(gt, cls);
        out[to_string(cls)] = overlap_prf(p, g, geo_iou);
    }
    {
        std::vector<const NonGeoPrimitive*> p, g;
        for (const auto& t : pred.texts) p.push_back(&t);
        for (const auto& t : gt.texts) g.push_back(&t);
        out["text"] = box_prf(p, g, nongeo_iou);
    }
    for (SymbolClass cls : kGlyphClasses)
        out[to_string(cls)] = box_prf(glyphs_of(pred, cls), glyphs_of(gt, cls), nongeo_iou);
    return out;
}

std::map<std::string, std::string> match_primitives(const PrimitiveSet& pred,
                                                    const PrimitiveSet& gt, double pos_threshold,
                                                    double box_iou_needed) {
    std::map<std::string, std::string> m;
    for (GeoClass cls : {GeoClass::Point, GeoClass::Line, GeoClass::Circle}) {
        auto p = of_class(pred, cls);
        auto g = of_class(gt, cls);
        for (const auto& pr : match_geo_class(p, g, cls, pos_threshold).pairs)
            m[pr.pred] = pr.gt;
    }
    auto box_match = [&](const std::vector<const NonGeoPrimitive*>& p,
                         const std::vector<const NonGeoPrimitive*>& g) {
        std::vector<std::string> pids, gids;
        for (const auto* x : p) pids.push_back(x->id);
        for (const auto* x : g) gids.push_back(x->id);
        auto cost = [&](std::size_t i, std::size_t j) {
            return 1.0 - box_iou(p[i]->box, g[j]->box);
        };
        for (const auto& pr : match_instances(pids, gids, cost, 1.0 - box_iou_needed).pairs)
            m[pr.pred] = pr.gt;
    };
    {
        std::vector<const NonGeoPrimitive*> p, g;
        for (const auto& t : pred.texts) p.push_back(&t);
        for (const auto& t : gt.texts) g.push_back(&t);
        box_match(p, g);
    }
    for (SymbolClass cls : kGlyphClasses) box_match(glyphs_of(pred, cls), glyphs_of(gt, cls));
    return m;
}

namespace {

const char* group_of(RelType t) {
    switch (t) {
        case RelType::PointOnLine:
        case RelType::PointOnCircle:
        case RelType::CenterOfCircle:
            return "Geo2Geo";
        case RelType::Text2Point:
        case RelType::Text2Line:
        case RelType::Text2Len:
        case RelType::Text2Degree:
        case RelType::Text2Angle:
        case RelType::Text2Area:
            return "Text2Geo";
        case RelType::Perpendicular:
        case RelType::AngleEquality:
        case RelType::BarEquality:
        case RelType::ParallelEquality:
            return "Sym2Geo";
        case RelType::ArrowIndication:
            return "Text2Head";
    }
    return "All";
}

void check_ids(const PrimitiveSet& prims, const std::vector<Relation>& rels) {
    for (const auto& r : rels) {
        if (!prims.find_geo(r.subject) && !prims.find_nongeo(r.subject))
            throw std::invalid_argument("relation names unknown primitive " + r.subject);
        for (const auto& o : r.objects)
            if (!prims.find_geo(o) && !prims.find_nongeo(o))
                throw std::invalid_argument("relation names unknown primitive " + o);
    }
}

}  // namespace

RelationEval eval_relations(const PrimitiveSet& pred_prims, const std::vector<Relation>& pred_rels,
                            const PrimitiveSet& gt_prims, const std::vector<Relation>& gt_rels,
                            const std::map<std::string, std::string>& pred2gt) {
    check_ids(pred_prims, pred_rels);
    check_ids(gt_prims, gt_rels);

    static const char* kGroups[] = {"All", "Geo2Geo", "Text2Geo", "Sym2Geo", "Text2Head"};
    std::map<std::string, std::map<std::string, int>> gt_terms;  // group -> term -> count
    auto term_key = [](RelType t, const std::string& s, const std::string& o) {
        return std::string(to_string(t)) + "|" + s + "|" + o;
    };
    std::map<std::string, std::array<int, 3>> counts;  // group -> tp, fp, gt_total
    for (const char* g : kGroups) counts[g] = {0, 0, 0};

    for (const auto& r : gt_rels)
        for (const auto& o : r.objects) {
            ++gt_terms[group_of(r.type)][term_key(r.type, r.subject, o)];
            ++counts["All"][2];
            ++counts[group_of(r.type)][2];
        }

    for (const auto& r : pred_rels) {
        auto subj = pred2gt.find(r.subject);
        const char* grp = group_of(r.type);
        for (const auto& o : r.objects) {
            auto obj = pred2gt.find(o);
            bool hit = false;
            if (subj != pred2gt.end() && obj != pred2gt.end()) {
                auto& bucket = gt_terms[grp];
                auto it = bucket.find(term_key(r.type, subj->second, obj->second));
                if (it != bucket.end() && it->second > 0) {
                    hit = true;
                    --it->second;
                }
            }
            ++counts["All"][hit ? 0 : 1];
            ++counts[grp][hit ? 0 : 1];
        }
    }

    RelationEval out;
    for (const char* g : kGroups) {
        auto [tp, fp, total] = counts[g];
        out.groups[g] = prf_from_counts(tp, fp, total - tp);
    }
    out.complete = out.groups["All"].fp == 0 && out.groups["All"].fn == 0;
    return out;
}

void FormalAggregate::add(const FormalDiagram& d) {
    ++diagrams;
    for (const auto& [g, p] : d.groups) {
        auto& c = pass_counts[g];
        if (p.f1 >= 0.5 - 1e-12) ++c[0];
        if (p.f1 >= 0.75 - 1e-12) ++c[1];
        if (p.recall >= 1.0 - 1e-12) ++c[2];
        if (p.f1 >= 1.0 - 1e-12) ++c[3];
    }
}

std::map<std::string, FormalIndicators> FormalAggregate::finalize() const {
    std::map<std::string, FormalIndicators> out;
    for (const auto& [g, c] : pass_counts) {
        FormalIndicators f;
        if (diagrams > 0) {
            f.likely = double(c[0]) / diagrams;
            f.almost = double(c[1]) / diagrams;
            f.perfect_recall = double(c[2]) / diagrams;
            f.totally = double(c[3]) / diagrams;
        }
        out[g] = f;
    }
    return out;
}

FormalDiagram eval_formal_diagram(const std::string& pred_text, const std::string& gt_text,
                                  const GroundTruthScene& gt_scene,
                                  const std::map<std::string, std::string>& pred2gt) {
    FormalDiagram out;
    std::vector<std::string> pred_bad, gt_bad;
    PropositionSet pred = parse_propositions_lenient(pred_text, &pred_bad);
    PropositionSet gt = parse_propositions_lenient(gt_text, &gt_bad);
    out.pred_errors = static_cast<int>(pred_bad.size());
    out.gt_errors = static_cast<int>(gt_bad.size());

    GeoContext ctx = make_context(gt_scene.prims, gt_scene.relations);

    // only names that exist on both ends can be aligned; the rest mismatch
    // naturally and count against the score
    std::map<std::string, std::string> names;
    for (const auto& [p, g] : pred2gt) names[p] = g;

    auto canon_set = [&](const PropositionSet& s, bool rename) {
        std::map<std::string, PropGroup> out_set;
        for (const auto& p : s.props) {
            PropNode q = rename ? rename_leaves(p, names) : p;
            q = canonicalize(q, ctx);
            out_set[serialize(q)] = classify_prop(q);
        }
        return out_set;
    };
    auto pred_set = canon_set(pred, true);
    auto gt_set = canon_set(gt, false);

    auto in_group = [](PropGroup g, const std::string& name) {
        if (name == "All") return true;
        if (name == "Geo2Geo") return g == PropGroup::GeoShape || g == PropGroup::Geo2Geo;
        return g == PropGroup::Text2Geo || g == PropGroup::Sym2Geo;
    };
    for (const char* g : {"All", "Geo2Geo", "NonGeo2Geo"}) {
        int tp = 0, fp = 0, fn = 0;
        for (const auto& [k, grp] : pred_set) {
            if (!in_group(grp, g)) continue;
            if (gt_set.count(k))
                ++tp;
            else
                ++fp;
        }
        for (const auto& [k, grp] : gt_set)
            if (in_group(grp, g) && !pred_set.count(k)) ++fn;
        if (g == std::string("All")) {
            fp += out.pred_errors;
            fn += out.gt_errors;
        }
        if (tp + fp + fn == 0) {
            PRF perfect;
            perfect.precision = perfect.recall = perfect.f1 = 1.0;
            out.groups[g] = perfect;
        } else {
            out.groups[g] = prf_from_counts(tp, fp, fn);
        }
    }
    return out;
}

namespace {

json prf_json(const PRF& p) {
    return json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1},
                {"tp", p.tp},               {"fp", p.fp},         {"fn", p.fn}};
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
    json j;
    j["diagrams"] = r.diagrams;
    for (const auto& [k, v] : r.manner1) j["manner1"][k] = prf_json(v);
    for (const auto& [k, v] : r.manner2) j["manner2"][k] = prf_json(v);
    for (const auto& [k, v] : r.relation_groups) j["relations"][k] = prf_json(v);
    j["complete_accuracy"] = r.complete_accuracy;
    if (r.has_formal)
        for (const auto& [k, v] : r.formal)
            j["formal"][k] = json{{"likely_same", v.likely},
                                  {"almost_same", v.almost},
                                  {"perfect_recall", v.perfect_recall},
                                  {"totally_same", v.totally}};
    return j.dump(2);
}

std::string format_report(const EvalReport& r) {
    std::ostringstream os;
    auto line = [&](const std::string& name, const PRF& p) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "  %-18s %6.2f %6.2f %6.2f\n", name.c_str(),
                      100 * p.precision, 100 * p.recall, 100 * p.f1);
        os << buf;
    };
    os << "diagrams: " << r.diagrams << "\n";
    if (!r.manner1.empty()) {
        os << "position matching (P/R/F1, %)\n";
        for (const auto& [k, v] : r.manner1) line(k, v);
    }
    if (!r.manner2.empty()) {
        os << "overlap matching (P/R/F1, %)\n";
        for (const auto& [k, v] : r.manner2) line(k, v);
    }
    if (!r.relation_groups.empty()) {
        os << "relation terms (P/R/F1, %)\n";
        for (const auto& [k, v] : r.relation_groups) line(k, v);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "  complete accuracy  %6.2f\n",
                      100 * r.complete_accuracy);
        os << buf;
    }
    if (r.has_formal) {
        os << "proposition agreement (% of diagrams)\n";
        for (const auto& [k, v] : r.formal) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "  %-12s likely %6.2f  almost %6.2f  recall %6.2f  total %6.2f\n",
                          k.c_str(), 100 * v.likely, 100 * v.almost, 100 * v.perfect_recall,
                          100 * v.totally);
            os << buf;
        }
    }
    return os.str();
}

}  // namespace geodiag
