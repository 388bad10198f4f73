#pragma once

// Constructive scene synthesis. Lines and circles are placed with explicit
// safety margins, points fall out of the same derivation the extractor
// uses, decorations attach to real structure, and a scene is only emitted
// once the relation parser reproduces the intended relation set exactly.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "geodiag/png_io.hpp"
#include "geodiag/scene.hpp"

namespace geodiag {

struct SceneConfig {
    int width = 512;
    int height = 512;
    int min_lines = 1;
    int max_lines = 8;
    int min_circles = 0;
    int max_circles = 2;
    double stroke_width = 2.0;
    double min_separation = 6.0;  // distinct points, parallel strokes

    // decoration appetite per family, 0 disables
    double w_perp = 0.55;
    double w_angle = 0.75;
    double w_bar = 0.6;
    double w_parallel = 0.5;
    double w_arrow = 0.45;
    double w_point_label = 0.85;
    double w_line_label = 0.4;
    double w_degree = 0.55;
    double w_len = 0.5;
    double w_area = 0.35;
    double w_angle_label = 0.45;

    // structure variants
    double w_dash = 0.22;
    double w_mixed = 0.1;
    double w_arc = 0.45;        // a circle drawn as an arc
    double w_center_dot = 0.6;  // a dotted circle center
    double w_free_point = 0.3;  // loose dotted points

    std::uint64_t seed = 0;

    bool operator==(const SceneConfig&) const = default;
};

// placement or verification gave up within the retry budget
struct SynthError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws std::invalid_argument naming the bad field.
void validate_config(const SceneConfig& cfg);

// Stable digest over every field except the seed; provenance for manifests.
std::string config_digest(const SceneConfig& cfg);

// Samples one scene, deterministic in (cfg, seed). Boxes are snapped to
// rendered ink and masks filled; when image_out is given the render that
// produced them is returned through it. Throws SynthError naming the first
// violated constraint when placement keeps failing.
GroundTruthScene sample_scene(const SceneConfig& cfg, std::uint64_t seed,
                              GrayImage* image_out = nullptr);

}  // namespace geodiag
