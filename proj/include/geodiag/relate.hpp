#pragma once

// Rule-based relation parsing: a sparse candidate graph from the prior
// knowledge table, then geometric decision rules for each relation family.

#include <optional>
#include <string>
#include <vector>

#include "geodiag/geom.hpp"

namespace geodiag {

struct RuleConfig {
    AdmissibilityTol tol;            // on-line/on-circle, search radii, perp angle, union gap
    double angle_arm_tol_deg = 10.0; // slack when matching a mark to a wedge bisector
    double on_ray_tol = 3.0;         // naming points along an angle arm
    double head_dir_tol_deg = 35.0;  // arrow back-ray vs text direction
    double min_ray_len = 6.0;        // a ray needs this much segment beyond the vertex
};

struct CandidateEdge {
    std::string subject;
    std::string object;
    RelType type;
};

struct CandidateGraph {
    std::vector<CandidateEdge> edges;
};

// Admissible (subject, object, type) triples whose coarse geometric
// pre-filter passes (distances within twice the decision tolerance for
// geo2geo, within the search radius for attachments).
CandidateGraph build_candidate_graph(const PrimitiveSet& prims, const RuleConfig& cfg = {});

// PointOnLine / PointOnCircle / CenterOfCircle decisions. Points sitting in
// a line's endpoint slots or an arc's endpoint slots are structural and not
// emitted as on-relations.
std::vector<Relation> parse_geo2geo(const PrimitiveSet& prims, const CandidateGraph& graph,
                                    const RuleConfig& cfg = {});

// A resolved angle mark: the wedge it sits in, named by arm points.
struct WedgeRef {
    std::string symbol;
    std::string a, vertex, b;  // triple as it appears in relations
};

struct SymbolAttach {
    std::vector<Relation> relations;
    std::vector<WedgeRef> wedges;         // one per resolved angle-class mark
    std::vector<std::string> unattached;  // "id: reason"
};

// Perpendicular pairing plus equality grouping of angle/bar/parallel marks.
// Heads are not attached here; they belong to arrow indication.
SymbolAttach attach_symbols(const PrimitiveSet& prims, const RuleConfig& cfg = {});

// Fine-grained text classification, content cues first, nearest structure
// as fallback. Total: every text ends up with a class (possibly unknown).
void classify_text(PrimitiveSet& prims, const RuleConfig& cfg = {});

struct TextAttach {
    std::vector<Relation> relations;
    std::vector<std::string> unattached;
};

// Text-to-structure attachment (wedge containment decides degree texts) and
// arrow indication; an arrow shifts the text's anchor to the head tip.
TextAttach attach_text(const PrimitiveSet& prims, const std::vector<WedgeRef>& wedges,
                       const RuleConfig& cfg = {});

// What an arrow head points at: walking the ray from the head away from its
// text, the first primitive whose locus comes within 5 px. Empty when the
// ray reaches nothing inside symbol_radius.
struct HeadTarget {
    std::string id;
    GeoClass cls = GeoClass::Line;
    Vec2 at{};
};
std::optional<HeadTarget> head_target(const PrimitiveSet& prims, const Vec2& head_center,
                                      const Vec2& away_from_text, const RuleConfig& cfg = {});

struct RelateResult {
    std::vector<Relation> relations;       // deterministically sorted
    std::vector<std::string> diagnostics;  // unattached symbols/texts
};

// The whole rule pipeline; assigns text classes in place.
RelateResult parse_relations(PrimitiveSet& prims, const RuleConfig& cfg = {});

}  // namespace geodiag
