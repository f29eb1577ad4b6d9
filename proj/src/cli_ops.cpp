#include "t3s2s/cli_ops.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "t3s2s/csv.hpp"
#include "t3s2s/error.hpp"
#include "t3s2s/pgm.hpp"
#include "t3s2s/pipeline.hpp"
#include "t3s2s/prompt_balance.hpp"

namespace t3s2s {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::IoError:
            return kExitIo;
        case ErrorKind::NonFiniteEmbedding:
        case ErrorKind::NonFiniteInput:
            return kExitNonFinite;
        default:
            return kExitConfig;
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create output directory " + dir);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot write " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error(ErrorKind::IoError, "short write to " + path);
}

std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

int resolve_threads(const CmdFlags& flags) {
    if (flags.threads > 0) return flags.threads;
    if (const char* env = std::getenv("T3S2S_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

RunOptions options_from_flags(const CmdFlags& flags) {
    RunOptions options;
    options.pb = !flags.disable_pb;
    options.cp = !flags.disable_cp;
    options.dt = !flags.disable_dt;
    options.seed_override = flags.seed;
    return options;
}

json report_to_json(const RunReport& report, const SceneSpec& scene,
                    const std::vector<std::string>& heatmap_files,
                    const std::vector<std::string>& preview_files) {
    json doc;
    doc["scene"] = report.scene_name;
    doc["seed"] = report.seed;
    doc["timesteps"] = report.timesteps;
    doc["modules"] = {{"pb", report.pb_on}, {"cp", report.cp_on}, {"dt", report.dt_on}};
    if (report.probe) {
        doc["probe"] = {{"k", report.probe->k}, {"factor", report.probe->factor}};
    }
    doc["k"] = report.cp_k;
    doc["beta"] = report.cp_beta;
    doc["dense"] = {{"lambda0", scene.dense.lambda0}, {"gamma", scene.dense.gamma}};

    doc["tokens"] = {{"n", report.tokens.n},
                     {"i_end", report.tokens.i_end},
                     {"words", report.tokens.words}};

    json keywords = json::array();
    for (size_t i = 0; i < report.keywords.indices.size(); ++i) {
        int idx = report.keywords.indices[i];
        keywords.push_back({{"index", idx},
                            {"id", report.keywords.instance_ids[i]},
                            {"word", report.tokens.word_at(idx)}});
    }
    doc["keywords"] = keywords;

    json stack = json::array();
    for (const LayerConfig& cfg : report.stack) {
        stack.push_back({{"index", cfg.index},
                         {"placement", cfg.placement},
                         {"h", cfg.h},
                         {"w", cfg.w},
                         {"d", cfg.d_model},
                         {"heads", cfg.heads},
                         {"dense", cfg.dense_tuning}});
    }
    doc["stack"] = stack;

    json responses = json::array();
    for (const ResponseEntry& r : report.responses) {
        responses.push_back({{"t", r.t},
                             {"layer", r.layer},
                             {"instance", r.instance_id},
                             {"in_mask", r.in_mask},
                             {"out_mask", r.out_mask}});
    }
    doc["responses"] = responses;

    json aggregates = json::array();
    for (size_t i = 0; i < report.keywords.indices.size(); ++i) {
        int id = report.keywords.instance_ids[i];
        aggregates.push_back({{"instance", id},
                              {"word", report.tokens.word_at(report.keywords.indices[i])},
                              {"in_mask", report.aggregate_in_mask(id)},
                              {"out_mask", report.aggregate_out_mask(id)}});
    }
    doc["aggregates"] = aggregates;

    uint64_t hist_total = 0;
    for (uint64_t c : report.topk_hist) hist_total += c;
    doc["topk_hist_total"] = hist_total;
    doc["heatmaps"] = heatmap_files;

    json previews = json::array();
    for (size_t i = 0; i < report.mask_previews.size(); ++i) {
        const MaskPreviewExport& p = report.mask_previews[i];
        previews.push_back({{"file", preview_files[i]},
                            {"layer", p.layer},
                            {"rank", p.rank},
                            {"channel", p.channel}});
    }
    doc["mask_previews"] = previews;
    doc["digest"] = hex64(report.digest);
    return doc;
}

// report.json + heatmaps + topk_hist.csv for one finished run
void write_run_bundle(const RunReport& report, const SceneSpec& scene, const std::string& dir) {
    ensure_dir(dir);
    int final_step = report.timesteps - 1;

    std::vector<std::string> heatmap_files;
    heatmap_files.reserve(report.attention_final.size());
    for (const AttentionMapExport& map : report.attention_final) {
        std::string name = "attn_L" + std::to_string(map.layer) + "_t" +
                           std::to_string(final_step) + "_tok" + std::to_string(map.token) +
                           ".pgm";
        render_heatmap(map.values, map.h, map.w, (fs::path(dir) / name).string());
        heatmap_files.push_back(name);
    }

    std::vector<std::string> preview_files;
    preview_files.reserve(report.mask_previews.size());
    for (const MaskPreviewExport& preview : report.mask_previews) {
        std::string name = "hmask_L" + std::to_string(preview.layer) + "_t" +
                           std::to_string(final_step) + "_r" + std::to_string(preview.rank) +
                           ".pgm";
        render_heatmap(preview.values, preview.h, preview.w, (fs::path(dir) / name).string());
        preview_files.push_back(name);
    }

    std::string hist = "index,token,count\n";
    for (int i = 0; i <= report.tokens.i_end; ++i) {
        hist += std::to_string(i) + "," + report.tokens.token_name(i) + "," +
                format_u64(report.topk_hist[static_cast<size_t>(i)]) + "\n";
    }
    write_text((fs::path(dir) / "topk_hist.csv").string(), hist);

    json doc = report_to_json(report, scene, heatmap_files, preview_files);
    write_text((fs::path(dir) / "report.json").string(), doc.dump(2) + "\n");
}

}  // namespace

int cmd_analyze_prompt(const std::string& scene_path, const std::string& out_dir) {
    try {
        SceneSpec scene = load_scene(scene_path);
        ensure_dir(out_dir);

        TokenSequence tokens = tokenize(scene.prompt, scene.n);
        std::vector<std::pair<std::string, int>> overrides;
        for (const SceneInstance& inst : scene.instances) {
            overrides.emplace_back(inst.word, inst.id);
        }
        KeywordIndices keywords = extract_keywords(tokens, default_lexicon(),
                                                   overrides.empty() ? nullptr : &overrides);
        if (keywords.empty()) {
            std::cerr << "warning: no instance keywords identified\n";
        }

        EmbeddingProvider provider =
            scene.provider_mode == "file"
                ? EmbeddingProvider::from_file(
                      (fs::path(scene.base_dir) / scene.provider_path).string(), scene.d)
                : EmbeddingProvider::synthetic(scene.provider_seed, scene.d);
        EmbeddingMatrix global = embed(tokens, provider);

        std::string energy = "index,token,value\n";
        for (const auto& [idx, value] : energy_profile(global, tokens.i_end)) {
            energy += std::to_string(idx) + "," + tokens.token_name(idx) + "," +
                      format_double(value) + "\n";
        }
        write_text((fs::path(out_dir) / "energy.csv").string(), energy);

        std::string single = "index,token,value\n";
        for (int idx = 1; idx < tokens.i_end; ++idx) {
            single += std::to_string(idx) + "," + tokens.word_at(idx) + "," +
                      format_double(l2_norm(embed_word(tokens.word_at(idx), provider))) + "\n";
        }
        write_text((fs::path(out_dir) / "energy_single.csv").string(), single);

        std::string cosine = "index,token,value\n";
        for (const auto& [idx, value] : cosine_profile(global, keywords, tokens, provider)) {
            cosine += std::to_string(idx) + "," + tokens.word_at(idx) + "," +
                      format_double(value) + "\n";
        }
        write_text((fs::path(out_dir) / "cosine.csv").string(), cosine);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_run(const std::string& scene_path, const std::string& out_dir, const CmdFlags& flags) {
    try {
        SceneSpec scene = load_scene(scene_path);
        RunReport report = run(scene, options_from_flags(flags));
        write_run_bundle(report, scene, out_dir);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_ablate(const std::string& scene_path, const std::string& out_dir, const CmdFlags& flags) {
    try {
        SceneSpec scene = load_scene(scene_path);
        ensure_dir(out_dir);
        int threads = resolve_threads(flags);

        SceneSpec variant_scene = scene;
        if (flags.seed) variant_scene.seed = *flags.seed;
        std::vector<RunReport> reports = ablation_matrix(variant_scene, threads);
        const std::vector<AblationVariant>& variants = ablation_variants();

        for (size_t i = 0; i < reports.size(); ++i) {
            write_run_bundle(reports[i], scene,
                             (fs::path(out_dir) / variants[i].name).string());
        }

        std::string csv = "variant,instance,word,in_mask,out_mask\n";
        for (size_t i = 0; i < reports.size(); ++i) {
            const RunReport& report = reports[i];
            for (size_t k = 0; k < report.keywords.indices.size(); ++k) {
                int id = report.keywords.instance_ids[k];
                csv += variants[i].name + "," + std::to_string(id) + "," +
                       report.tokens.word_at(report.keywords.indices[k]) + "," +
                       format_double(report.aggregate_in_mask(id)) + "," +
                       format_double(report.aggregate_out_mask(id)) + "\n";
            }
        }
        write_text((fs::path(out_dir) / "ablation.csv").string(), csv);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_probe_topk(const std::string& scene_path, const std::string& out_dir,
                   const CmdFlags& flags) {
    try {
        SceneSpec scene = load_scene(scene_path);
        ensure_dir(out_dir);
        ProbeReport probe = topk_probe(scene, flags.k_list, flags.factor, flags.seed);

        std::string csv = "k,instance,word,response\n";
        for (size_t ki = 0; ki < probe.k_values.size(); ++ki) {
            for (size_t ii = 0; ii < probe.instance_ids.size(); ++ii) {
                csv += std::to_string(probe.k_values[ki]) + "," +
                       std::to_string(probe.instance_ids[ii]) + "," + probe.instance_words[ii] +
                       "," + format_double(probe.responses[ki][ii]) + "\n";
            }
        }
        write_text((fs::path(out_dir) / "probe.csv").string(), csv);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace t3s2s
