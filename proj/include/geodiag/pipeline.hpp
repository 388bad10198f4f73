#pragma once

// Batch workflows behind the command line: corpus synthesis, image parsing,
// corpus evaluation, and overlay rendering for inspection.

#include <cstdint>
#include <string>
#include <vector>

#include "geodiag/extract.hpp"
#include "geodiag/relate.hpp"
#include "geodiag/synth.hpp"

namespace geodiag {

// shared exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;   // unreadable or undecodable input
inline constexpr int kExitCorpus = 3;  // directories out of step
inline constexpr int kExitConfig = 4;  // invalid configuration

struct RunConfig {
    int count = 0;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string mode = "all";  // eval: manner1 | manner2 | relations | language | all
    int workers = 0;           // 0 picks the hardware count
    std::string report_path;
    bool with_masks = true;
    bool with_formal = true;

    SceneConfig scene;
    ExtractionConfig extraction;
    RuleConfig rules;
};

// Merges a JSON config file ({"scene": {...}, "extraction": {...},
// "rules": {...}}, every section optional) into cfg. Unknown keys throw
// std::runtime_error. Flag overrides are applied by the caller afterwards,
// so flags win.
void load_config_file(const std::string& path, RunConfig& cfg);

// Writes <id>.png/.json/.masks.json per diagram plus manifest.json.
int run_synth(const RunConfig& cfg);

// extract -> relate -> propositions for each image; writes
// <stem>.parsed.json (+ .parsed.masks.json, .formal.txt) into cfg.out_dir.
int run_parse(const std::vector<std::string>& images, const RunConfig& cfg);

// Scores a parsed corpus against its reference corpus; writes the report.
int run_eval(const std::string& pred_dir, const std::string& gt_dir, const RunConfig& cfg);

// SVG with the raster embedded and parsed primitives drawn over it.
int run_overlay(const std::string& image_path, const std::string& parsed_json,
                const std::string& out_svg);

}  // namespace geodiag
