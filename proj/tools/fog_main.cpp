// fog: render fog into MOTChallenge-style datasets and score trackers.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fogsim/error.hpp"
#include "fogsim/evalharness.hpp"
#include "fogsim/motmetrics.hpp"
#include "fogsim/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;

fogsim::Color parse_rgb(const std::string& spec) {
    // "rgb:R,G,B" with channels in [0,1].
    const std::string body = spec.substr(4);
    std::stringstream ss(body);
    fogsim::Color c{};
    std::string part;
    std::size_t i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) {
            throw fogsim::InvalidArgument("--light rgb: expects exactly 3 channels");
        }
        try {
            std::size_t used = 0;
            c[i] = std::stod(part, &used);
            if (used != part.size()) {
                throw std::invalid_argument(part);
            }
        } catch (const std::logic_error&) {
            throw fogsim::InvalidArgument("--light rgb: cannot parse channel '" + part + "'");
        }
        ++i;
    }
    if (i != 3) {
        throw fogsim::InvalidArgument("--light rgb: expects exactly 3 channels");
    }
    return c;
}

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> levels;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            levels.push_back(std::stoi(part));
        } catch (const std::logic_error&) {
            throw fogsim::InvalidArgument("--levels: cannot parse '" + part + "'");
        }
    }
    return levels;
}

struct RenderArgs {
    std::string input;
    std::string output;
    std::string mode = "homo";
    int level = 0;
    double visibility = 0.0;
    std::uint64_t seed = 0;
    std::string depth_dir;
    std::string light = "dcp";
    double dmin = 0.0;
    double dmax = 0.0;
    int patch = 10;
    int octaves = fogsim::turbulence::kDefaultOctaves;
    double brightness = fogsim::turbulence::kDefaultBrightness;
    bool lossless = false;
    bool debug_turbulence = false;
};

int run_render(const RenderArgs& a, const CLI::App& cmd) {
    namespace pl = fogsim::pipeline;
    pl::FogConfig cfg;
    if (a.mode == "homo") {
        cfg.mode = pl::FogMode::homogeneous;
    } else if (a.mode == "hetero") {
        cfg.mode = pl::FogMode::heterogeneous;
    } else {
        throw fogsim::InvalidArgument("--mode must be homo or hetero");
    }
    if (cmd.count("--level") > 0) {
        cfg.level = a.level;
    }
    if (cmd.count("--visibility") > 0) {
        cfg.visibility_m = a.visibility;
    }
    cfg.seed = a.seed;
    if (!a.depth_dir.empty()) {
        cfg.depth_dir = a.depth_dir;
    }
    if (a.light == "dcp") {
        cfg.light_strategy = pl::LightStrategy::dcp;
    } else if (a.light == "sky") {
        cfg.light_strategy = pl::LightStrategy::sky;
    } else if (a.light.rfind("rgb:", 0) == 0) {
        cfg.light_strategy = pl::LightStrategy::fixed;
        cfg.fixed_light = parse_rgb(a.light);
    } else {
        throw fogsim::InvalidArgument("--light must be dcp, sky or rgb:R,G,B");
    }
    const bool has_dmin = cmd.count("--dmin") > 0;
    const bool has_dmax = cmd.count("--dmax") > 0;
    if (has_dmin != has_dmax) {
        throw fogsim::InvalidArgument("--dmin and --dmax must be given together");
    }
    if (has_dmin) {
        cfg.calibration = fogsim::depth::SceneReference{a.dmin, a.dmax};
    }
    cfg.patch.size = a.patch;
    cfg.octaves = a.octaves;
    cfg.brightness = a.brightness;
    cfg.lossless = a.lossless;
    cfg.debug_turbulence = a.debug_turbulence;
    cfg.validate();

    std::vector<std::filesystem::path> found;
    try {
        found = pl::find_sequences(a.input);
    } catch (const fogsim::IoError& e) {
        throw fogsim::InvalidArgument(e.what());
    }
    if (found.empty()) {
        throw fogsim::InvalidArgument("no sequences found in " + a.input);
    }

    const auto result = pl::render_dataset(a.input, cfg, a.output);
    for (const auto& s : result.sequences) {
        if (s.ok()) {
            std::cout << "rendered " << s.name << " (" << s.manifest->frames.size()
                      << " frames, beta=" << s.manifest->beta << ")\n";
        } else {
            std::cerr << "failed " << s.name << ": " << s.error << '\n';
        }
    }
    return result.all_ok() ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Physics-based fog rendering and tracking robustness evaluation"};
    app.require_subcommand(1);

    RenderArgs render;
    auto* cmd_render = app.add_subcommand("render", "Render fog into a dataset of sequences");
    cmd_render->add_option("--input", render.input, "Dataset root or a single sequence")->required();
    cmd_render->add_option("--output", render.output, "Output root")->required();
    cmd_render->add_option("--mode", render.mode, "homo or hetero")
        ->check(CLI::IsMember({"homo", "hetero"}));
    auto* opt_level = cmd_render->add_option("--level", render.level, "Abstract fog level 1..4")
                          ->check(CLI::Range(1, 4));
    auto* opt_vis = cmd_render->add_option("--visibility", render.visibility, "Visibility in meters");
    opt_level->excludes(opt_vis);
    cmd_render->add_option("--seed", render.seed, "Turbulence seed");
    cmd_render->add_option("--depth-dir", render.depth_dir,
                           "Root with <sequence>/<frame>.pfm|png (default <sequence>/depth)");
    cmd_render->add_option("--light", render.light, "dcp, sky or rgb:R,G,B");
    cmd_render->add_option("--dmin", render.dmin, "Nearest scene distance (m)");
    cmd_render->add_option("--dmax", render.dmax, "Farthest scene distance (m)");
    cmd_render->add_option("--patch", render.patch, "Dark-channel patch size (px)");
    cmd_render->add_option("--octaves", render.octaves, "Turbulence octaves");
    cmd_render->add_option("--brightness", render.brightness, "Turbulence brightness (0,1]");
    cmd_render->add_flag("--lossless", render.lossless, "Encode frames as PNG");
    cmd_render->add_flag("--debug-turbulence", render.debug_turbulence,
                         "Write turbulence.png per sequence");

    std::string gt_path;
    std::string results_path;
    double eval_iou = fogsim::mot::kDefaultIouThreshold;
    auto* cmd_eval = app.add_subcommand("eval", "Score a tracker result file against ground truth");
    cmd_eval->add_option("--gt", gt_path, "MOTChallenge gt.txt")->required();
    cmd_eval->add_option("--results", results_path, "Tracker output")->required();
    cmd_eval->add_option("--iou", eval_iou, "IoU threshold for CLEAR/IDF1");

    std::string scene_path;
    std::string levels_text = "1,2,3,4";
    std::string sweep_out;
    auto* cmd_sweep = app.add_subcommand("sweep", "Synthetic fog-level robustness sweep");
    cmd_sweep->add_option("--scene", scene_path, "JSON scene description")->required();
    cmd_sweep->add_option("--levels", levels_text, "Comma-separated fog levels");
    cmd_sweep->add_option("--out", sweep_out, "Directory for report.csv and report.md")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*cmd_render) {
            return run_render(render, *cmd_render);
        }
        if (*cmd_eval) {
            if (!(eval_iou > 0.0 && eval_iou <= 1.0)) {
                throw fogsim::InvalidArgument("--iou must lie in (0, 1]");
            }
            namespace mot = fogsim::mot;
            const auto gt = mot::evaluation_subset(
                mot::load_mot_file(gt_path, mot::MotFileKind::ground_truth));
            const auto pred = mot::load_mot_file(results_path, mot::MotFileKind::results);
            const auto r = mot::evaluate(gt, pred, eval_iou);
            std::printf("HOTA %.2f\nMOTA %.2f\nMOTP %.2f\nIDF1 %.2f\nID_Sw %lld\nFP %lld\nFN %lld\n",
                        r.hota, r.mota, r.motp, r.idf1, static_cast<long long>(r.id_switches),
                        static_cast<long long>(r.fp), static_cast<long long>(r.fn));
            return kExitOk;
        }
        if (*cmd_sweep) {
            namespace ev = fogsim::eval;
            const auto setup = ev::load_sweep_setup(scene_path);
            const auto levels = ev::standard_levels(setup.mode, parse_levels(levels_text), setup.fog_seed);
            const auto report = ev::sweep(setup.scene, levels, setup.options);
            report.write(sweep_out);
            std::cout << report.to_markdown();
            return kExitOk;
        }
    } catch (const fogsim::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}
