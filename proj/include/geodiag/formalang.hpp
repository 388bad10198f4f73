#pragma once

// The textual proposition language: parsing, serialization, canonical forms
// and generation from an annotated primitive/relation set.
//
// One proposition per line, e.g.
//   PointLiesOnLine(C, Line(A, B))
//   Equals(MeasureOf(Angle(A, B, C)), 62)

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "geodiag/geom.hpp"

namespace geodiag {

struct PropNode {
    std::string head;            // predicate name, identifier or number
    std::vector<PropNode> args;  // empty for a leaf atom

    bool leaf() const { return args.empty(); }
    bool operator==(const PropNode& o) const = default;
};

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(int line_, int col_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                             ": " + msg),
          line(line_),
          col(col_) {}
};

std::string serialize(const PropNode& p);

// Proposition groups, in serialization order.
enum class PropGroup { GeoShape = 0, Geo2Geo = 1, Text2Geo = 2, Sym2Geo = 3 };
PropGroup classify_prop(const PropNode& p);

struct PropositionSet {
    std::vector<PropNode> props;

    // group order then lexicographic, exact duplicates removed
    void sort_and_dedup();
    bool operator==(const PropositionSet& o) const = default;
};

std::string serialize(const PropositionSet& set);

PropNode parse_proposition(const std::string& text, int line_no = 1);
PropositionSet parse_propositions(const std::string& text);  // throws ParseError

// Like parse_propositions but collects bad lines instead of throwing.
PropositionSet parse_propositions_lenient(const std::string& text,
                                          std::vector<std::string>* errors);

// ---------------------------------------------------------------------------
// Canonical forms need coordinates: proposition names resolve to geometry.

struct GeoContext {
    std::map<std::string, Vec2> points;             // by proposition name
    std::map<std::string, CirclePos> radius_tokens; // "radius_0" -> circle
    double tol = 3.0;                               // on-ray / on-line slack, px

    std::vector<NamedPoint> all_points() const;
};

// Context for a primitive set: point names come from point-label texts where
// present, primitive ids otherwise; radius tokens follow circle order.
GeoContext make_context(const PrimitiveSet& prims, const std::vector<Relation>& relations);

// Name of a point as it appears in propositions (label if labeled).
std::map<std::string, std::string> proposition_point_names(const PrimitiveSet& prims,
                                                           const std::vector<Relation>& relations);

// Rewrites a proposition into its canonical form: angle arms replaced by the
// farthest on-ray candidates and ordered, line names by the extreme point
// pair, symmetric arguments sorted. Names absent from the context are kept.
PropNode canonicalize(const PropNode& p, const GeoContext& ctx);

bool equivalent(const PropNode& a, const PropNode& b, const GeoContext& ctx);

// Substitute leaf names via map (used when aligning predicted ids with
// reference ones). Unmapped names pass through unchanged.
PropNode rename_leaves(const PropNode& p, const std::map<std::string, std::string>& m);

// ---------------------------------------------------------------------------
// Generation from annotation.

PropositionSet generate_propositions(const PrimitiveSet& prims,
                                     const std::vector<Relation>& relations);

}  // namespace geodiag
