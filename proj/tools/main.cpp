#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "t3s2s/cli_ops.hpp"

namespace {

bool parse_disable_list(const std::vector<std::string>& items, t3s2s::CmdFlags& flags) {
    for (const std::string& item : items) {
        if (item == "pb") {
            flags.disable_pb = true;
        } else if (item == "cp") {
            flags.disable_cp = true;
        } else if (item == "dt") {
            flags.disable_dt = true;
        } else {
            std::cerr << "error: --disable accepts pb, cp, dt (got '" << item << "')\n";
            return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"training-free triplet tuning over sketch-conditioned cross-attention"};
    app.require_subcommand(1);

    std::string scene_path;
    std::string out_dir;
    std::vector<std::string> disable;
    std::vector<int> k_list = {0, 1, 2, 3, 4};
    double factor = 2.0;
    uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd, bool with_flags) {
        cmd->add_option("--scene", scene_path, "scene JSON file")->required();
        cmd->add_option("--out", out_dir, "output directory")->required();
        if (with_flags) {
            cmd->add_option("--seed", seed, "override the scene seed")
                ->each([&](const std::string&) { seed_set = true; });
        }
    };

    CLI::App* analyze = app.add_subcommand("analyze-prompt", "token energy and cosine profiles");
    add_common(analyze, false);

    CLI::App* run_cmd = app.add_subcommand("run", "full tuned run with report and heatmaps");
    add_common(run_cmd, true);
    run_cmd->add_option("--disable", disable, "disable modules: pb, cp, dt")->delimiter(',');

    CLI::App* ablate = app.add_subcommand("ablate", "six-variant module ablation");
    add_common(ablate, true);

    CLI::App* probe = app.add_subcommand("probe-topk", "value-amplification sweep over K");
    add_common(probe, true);
    probe->add_option("--k-list", k_list, "K values to sweep")->delimiter(',');
    probe->add_option("--factor", factor, "amplification factor");

    CLI11_PARSE(app, argc, argv);

    t3s2s::CmdFlags flags;
    if (!parse_disable_list(disable, flags)) return t3s2s::kExitConfig;
    if (seed_set) flags.seed = seed;
    flags.k_list = k_list;
    flags.factor = factor;

    if (analyze->parsed()) return t3s2s::cmd_analyze_prompt(scene_path, out_dir);
    if (run_cmd->parsed()) return t3s2s::cmd_run(scene_path, out_dir, flags);
    if (ablate->parsed()) return t3s2s::cmd_ablate(scene_path, out_dir, flags);
    if (probe->parsed()) return t3s2s::cmd_probe_topk(scene_path, out_dir, flags);
    return t3s2s::kExitConfig;
}
