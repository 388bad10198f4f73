#pragma once

// Scene container (primitives + relations + propositions) and its on-disk
// annotation format: one JSON file per diagram plus an RLE mask sidecar.

#include <cstdint>
#include <string>
#include <vector>

#include "geodiag/geom.hpp"

namespace geodiag {

struct GroundTruthScene {
    std::string id;
    int width = 0;
    int height = 0;
    PrimitiveSet prims;
    std::vector<Relation> relations;
    std::vector<std::string> propositions;  // serialized, one per entry

    // provenance, recorded in the corpus manifest rather than the annotation
    std::uint64_t seed = 0;
    std::string config_hash;

    // extraction diagnostics carried through parsed files
    std::vector<std::string> diagnostics;
};

// Deterministic relation order (by type, subject, objects).
void sort_relations(std::vector<Relation>& rels);

// Serialized annotation bytes; stable for equal scenes.
std::string scene_to_json(const GroundTruthScene& scene);

// Parses and validates an annotation. With lenient=true unknown class labels
// map to "unknown" and structurally bad relations are dropped instead of
// raising. Throws std::runtime_error with a description otherwise.
GroundTruthScene scene_from_json(const std::string& text, bool lenient = false);

void write_scene_json(const std::string& path, const GroundTruthScene& scene);
GroundTruthScene read_scene_json(const std::string& path, bool lenient = false);

// Mask sidecar: {"width", "height", "masks": {geo_id: [counts...]}}.
std::string masks_to_json(const GroundTruthScene& scene);
void masks_from_json(const std::string& text, GroundTruthScene& scene);
void write_masks_json(const std::string& path, const GroundTruthScene& scene);
void read_masks_json(const std::string& path, GroundTruthScene& scene);

// Small file helpers (writes go through a temp file + rename).
std::string read_text_file(const std::string& path);
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace geodiag
