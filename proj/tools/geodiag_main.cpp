// Command line front end: synthesize corpora, parse diagram images, score a
// parsed corpus against its reference, render overlay SVGs.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geodiag/log.hpp"
#include "geodiag/pipeline.hpp"

using namespace geodiag;

int main(int argc, char** argv) {
    CLI::App app{"plane geometry diagram tool"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::vector<std::string> images;
    std::string pred_dir, gt_dir, image_path, parsed_json, out_svg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--workers", cfg.workers, "worker threads, 0 = hardware count");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a labelled corpus");
    synth->add_option("--count", cfg.count, "number of diagrams")->required();
    synth->add_option("--seed", cfg.seed, "base seed, diagram i uses seed+i");
    synth->add_option("--out", cfg.out_dir, "output directory")->required();
    synth->add_flag("--masks,!--no-masks", cfg.with_masks, "write mask sidecars");
    add_common(synth);

    CLI::App* parse = app.add_subcommand("parse", "parse diagram images");
    parse->add_option("images", images, "input PNG files")->required()->expected(-1);
    parse->add_option("--out", cfg.out_dir, "output directory")->required();
    parse->add_flag("--masks,!--no-masks", cfg.with_masks, "write mask sidecars");
    parse->add_flag("--formal,!--no-formal", cfg.with_formal, "emit formal propositions");
    add_common(parse);

    CLI::App* eval = app.add_subcommand("eval", "score parsed against reference");
    eval->add_option("pred", pred_dir, "parsed corpus directory")->required();
    eval->add_option("gt", gt_dir, "reference corpus directory")->required();
    eval->add_option("--mode", cfg.mode, "manner1|manner2|relations|language|all");
    eval->add_option("--report", cfg.report_path, "report path, default <pred>/report.json");
    eval->add_flag("--formal,!--no-formal", cfg.with_formal, "include language scores");
    add_common(eval);

    CLI::App* overlay = app.add_subcommand("overlay", "render parse results over the image");
    overlay->add_option("image", image_path, "diagram PNG")->required();
    overlay->add_option("parsed", parsed_json, "parsed scene JSON")->required();
    overlay->add_option("--out", out_svg, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    // the file carries the nested tool configs; command line flags own the rest
    if (!config_path.empty()) {
        try {
            load_config_file(config_path, cfg);
        } catch (const std::exception& e) {
            log_error(e.what());
            return kExitConfig;
        }
    }

    try {
        if (synth->parsed()) return run_synth(cfg);
        if (parse->parsed()) return run_parse(images, cfg);
        if (eval->parsed()) return run_eval(pred_dir, gt_dir, cfg);
        if (overlay->parsed()) return run_overlay(image_path, parsed_json, out_svg);
    } catch (const std::exception& e) {
        log_error(e.what());
        return kExitInput;
    }
    return kExitOk;
}
