#pragma once

// Scoring of parsed scenes against reference annotation: one-to-one instance
// matching, position and overlap metrics, binary relation terms, and the
// proposition-level agreement indicators.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "geodiag/geom.hpp"
#include "geodiag/scene.hpp"

namespace geodiag {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

// F1 is 0 when precision + recall is 0; an absent class scores all zeros.
PRF prf_from_counts(int tp, int fp, int fn);

struct MatchResult {
    struct Pair {
        std::string pred;
        std::string gt;
        double cost;
    };
    std::vector<Pair> pairs;  // sorted by pred id
    std::vector<std::string> unmatched_pred;
    std::vector<std::string> unmatched_gt;
};

// Optimal one-to-one matching among pairs with cost <= threshold; maximum
// cardinality first, minimum total cost second.
MatchResult match_instances(const std::vector<std::string>& pred_ids,
                            const std::vector<std::string>& gt_ids,
                            const std::function<double(std::size_t, std::size_t)>& cost,
                            double threshold);

// Position costs.
double line_cost(const LinePos& a, const LinePos& b);        // endpoints, best pairing
double circle_cost(const CirclePos& a, const CirclePos& b);  // center distance + radius gap

// Per-class precision/recall/F1 keyed by class name; every class of the fixed
// taxonomy is present, absent ones as 0.00.
using ClassPRF = std::map<std::string, PRF>;

// Position evaluation over the geometric classes (point, line, circle).
ClassPRF eval_manner1(const PrimitiveSet& pred, const PrimitiveSet& gt, double threshold = 15.0);

// Overlap evaluation: masks for geometric instances, boxes for the rest.
// Throws std::invalid_argument on mask dimension mismatch.
ClassPRF eval_manner2(const PrimitiveSet& pred, const PrimitiveSet& gt, double geo_iou = 0.75,
                      double nongeo_iou = 0.5);

// Combined pred -> gt id map: geometry by position, symbols and texts by box
// overlap within the same class.
std::map<std::string, std::string> match_primitives(const PrimitiveSet& pred,
                                                    const PrimitiveSet& gt,
                                                    double pos_threshold = 15.0,
                                                    double box_iou = 0.5);

struct RelationEval {
    std::map<std::string, PRF> groups;  // All, Geo2Geo, Text2Geo, Sym2Geo, Text2Head
    bool complete = false;              // every binary term of this diagram correct
};

// Expands each relation into (subject, object) terms and scores them through
// the primitive mapping. Throws std::invalid_argument when a relation names a
// primitive missing from its own scene.
RelationEval eval_relations(const PrimitiveSet& pred_prims, const std::vector<Relation>& pred_rels,
                            const PrimitiveSet& gt_prims, const std::vector<Relation>& gt_rels,
                            const std::map<std::string, std::string>& pred2gt);

// Proposition agreement for one diagram. Both sides are canonicalized in the
// reference scene's geometry after predicted names are aligned; unparseable
// lines are dropped and penalized. Group keys: All, Geo2Geo, NonGeo2Geo; a
// group empty on both sides counts as perfect agreement.
struct FormalDiagram {
    std::map<std::string, PRF> groups;
    int pred_errors = 0;
    int gt_errors = 0;
};

FormalDiagram eval_formal_diagram(const std::string& pred_text, const std::string& gt_text,
                                  const GroundTruthScene& gt_scene,
                                  const std::map<std::string, std::string>& pred2gt);

// Corpus indicators: fraction of diagrams at or above each agreement level.
struct FormalIndicators {
    double likely = 0.0;          // F1 >= 0.50
    double almost = 0.0;          // F1 >= 0.75
    double perfect_recall = 0.0;  // recall = 1
    double totally = 0.0;         // F1 = 1
};

struct FormalAggregate {
    int diagrams = 0;
    std::map<std::string, std::array<int, 4>> pass_counts;

    void add(const FormalDiagram& d);
    std::map<std::string, FormalIndicators> finalize() const;
};

// Corpus-level roll-up of everything above.
struct EvalReport {
    int diagrams = 0;
    ClassPRF manner1;
    ClassPRF manner2;
    std::map<std::string, PRF> relation_groups;
    double complete_accuracy = 0.0;
    std::map<std::string, FormalIndicators> formal;
    bool has_formal = false;
};

std::string report_to_json(const EvalReport& r);

// Plain-text table for eyeballing diffs.
std::string format_report(const EvalReport& r);

}  // namespace geodiag
