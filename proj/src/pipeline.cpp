#include "t3s2s/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <thread>

#include "t3s2s/error.hpp"
#include "t3s2s/prompt_balance.hpp"
#include "t3s2s/rng.hpp"

namespace t3s2s {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kFeatureDomain = 0x58;

class Digest {
  public:
    void add_u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) add_byte(static_cast<uint8_t>(v >> (8 * i)));
    }
    void add_double(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        add_u64(bits);
    }
    void add_doubles(const std::vector<double>& vs) {
        for (double v : vs) add_double(v);
    }
    uint64_t value() const { return state_; }

  private:
    void add_byte(uint8_t b) {
        state_ ^= b;
        state_ *= 1099511628211ull;
    }
    uint64_t state_ = 1469598103934665603ull;
};

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).string();
}

struct PreparedScene {
    TokenSequence tokens;
    KeywordIndices keywords;
    EmbeddingProvider provider;
    EmbeddingMatrix global;
    MaskPyramid pyramid;
    std::vector<LayerConfig> stack;
    std::vector<ProjectionWeights> weights;
    uint64_t seed = 0;
};

EmbeddingProvider make_provider(const SceneSpec& scene) {
    if (scene.provider_mode == "file") {
        return EmbeddingProvider::from_file(resolve_path(scene.base_dir, scene.provider_path),
                                            scene.d);
    }
    return EmbeddingProvider::synthetic(scene.provider_seed, scene.d);
}

MaskPyramid load_pyramid(const SceneSpec& scene, const std::vector<LayerConfig>& stack,
                         const KeywordIndices& keywords) {
    std::vector<std::pair<int, int>> resolutions;
    resolutions.reserve(stack.size());
    for (const LayerConfig& cfg : stack) resolutions.emplace_back(cfg.h, cfg.w);

    if (scene.instances.empty()) {
        // No instance list: lexicon-derived keywords get masks only when the
        // scene still ships a label map; otherwise they run with empty masks.
        if (!scene.sketch_path.empty() && !keywords.empty()) {
            int max_id = *std::max_element(keywords.instance_ids.begin(),
                                           keywords.instance_ids.end());
            SketchLabelMap map =
                load_label_map(resolve_path(scene.base_dir, scene.sketch_path), max_id);
            return build_pyramid(map, keywords, resolutions, /*allow_empty=*/true);
        }
        MaskPyramid pyr;
        for (const auto& [h, w] : resolutions) {
            MaskPyramid::Level level;
            level.h = h;
            level.w = w;
            for (int id : keywords.instance_ids) {
                level.masks.emplace(id, std::vector<uint8_t>(static_cast<size_t>(h) * w, 0));
            }
            pyr.levels.push_back(std::move(level));
        }
        pyr.warning_empty_instance = !keywords.empty();
        return pyr;
    }

    bool per_instance = !scene.instances.front().sketch_path.empty();
    if (per_instance) {
        std::map<int, InstanceMask> masks;
        int h = -1, w = -1;
        for (const SceneInstance& inst : scene.instances) {
            GrayImage img = read_pgm(resolve_path(scene.base_dir, inst.sketch_path));
            if (h < 0) {
                h = img.h;
                w = img.w;
            } else if (img.h != h || img.w != w) {
                throw Error(ErrorKind::ConfigError,
                            "per-instance sketches must share one resolution");
            }
            InstanceMask mask;
            mask.h = img.h;
            mask.w = img.w;
            mask.cells.resize(img.px.size());
            for (size_t i = 0; i < img.px.size(); ++i) mask.cells[i] = img.px[i] ? 1 : 0;
            masks.emplace(inst.id, std::move(mask));
        }
        return build_pyramid_from_masks(masks, resolutions, /*allow_empty=*/true);
    }

    int max_id = 0;
    for (const SceneInstance& inst : scene.instances) max_id = std::max(max_id, inst.id);

    std::string sketch = resolve_path(scene.base_dir, scene.sketch_path);
    SketchLabelMap map;
    bool any_color = std::any_of(scene.instances.begin(), scene.instances.end(),
                                 [](const SceneInstance& i) { return i.color.has_value(); });
    if (any_color) {
        ColorTable table;
        for (const SceneInstance& inst : scene.instances) {
            if (!inst.color) {
                throw Error(ErrorKind::ConfigError,
                            "color sketches need a color for every instance");
            }
            table.emplace_back(*inst.color, inst.id);
        }
        map = label_map_from_color(read_ppm(sketch), table, max_id);
    } else {
        map = load_label_map(sketch, max_id);
    }

    KeywordIndices binding;
    for (const SceneInstance& inst : scene.instances) {
        binding.indices.push_back(0);  // only ids matter here
        binding.instance_ids.push_back(inst.id);
    }
    return build_pyramid(map, binding, resolutions, /*allow_empty=*/true);
}

PreparedScene prepare(const SceneSpec& scene, const RunOptions& options) {
    scene.validate();
    PreparedScene prep;
    prep.seed = options.seed_override.value_or(scene.seed);
    prep.tokens = tokenize(scene.prompt, scene.n);

    std::vector<std::pair<std::string, int>> overrides;
    for (const SceneInstance& inst : scene.instances) {
        overrides.emplace_back(inst.word, inst.id);
    }
    prep.keywords = extract_keywords(prep.tokens, default_lexicon(),
                                     overrides.empty() ? nullptr : &overrides);

    prep.provider = make_provider(scene);
    if (options.inject_embeddings != nullptr) {
        prep.global = *options.inject_embeddings;
    } else {
        prep.global = embed(prep.tokens, prep.provider);
    }

    prep.stack = make_stack(scene, prep.seed);
    prep.pyramid = load_pyramid(scene, prep.stack, prep.keywords);
    prep.weights.reserve(prep.stack.size());
    for (const LayerConfig& cfg : prep.stack) {
        prep.weights.push_back(ProjectionWeights::create(cfg, scene.d));
    }
    return prep;
}

std::vector<double> head_average_column(const LayerResult& result, int token) {
    int b = result.heads.front().attn.rows;
    std::vector<double> out(static_cast<size_t>(b), 0.0);
    for (const HeadState& head : result.heads) {
        for (int p = 0; p < b; ++p) out[static_cast<size_t>(p)] += head.attn(p, token);
    }
    double inv = 1.0 / static_cast<double>(result.heads.size());
    for (double& v : out) v *= inv;
    return out;
}

}  // namespace

Matrix synth_query_features(uint64_t seed, int layer_index, int timestep, int b, int d) {
    if (b < 1 || d < 1) {
        throw Error(ErrorKind::ConfigError, "synth_query_features: dims must be positive");
    }
    uint64_t key = mix64(mix64(mix64(seed, kFeatureDomain), static_cast<uint64_t>(layer_index)),
                         static_cast<uint64_t>(timestep));
    GaussianStream stream(key);
    Matrix x(b, d);
    for (double& v : x.data) v = stream.next();
    return x;
}

double schedule_tau(int t, int timesteps) {
    if (timesteps < 1 || t < 0 || t >= timesteps) {
        throw Error(ErrorKind::ConfigError, "schedule_tau: step outside [0,T)");
    }
    if (timesteps == 1) return 0.0;
    return static_cast<double>(timesteps - 1 - t) / static_cast<double>(timesteps - 1);
}

double RunReport::aggregate_in_mask(int instance_id) const {
    double sum = 0.0;
    size_t count = 0;
    for (const ResponseEntry& r : responses) {
        if (r.instance_id == instance_id) {
            sum += r.in_mask;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double RunReport::aggregate_out_mask(int instance_id) const {
    double sum = 0.0;
    size_t count = 0;
    for (const ResponseEntry& r : responses) {
        if (r.instance_id == instance_id) {
            sum += r.out_mask;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

RunReport run(const SceneSpec& scene, const RunOptions& options) {
    PreparedScene prep = prepare(scene, options);

    RunReport report;
    report.scene_name = scene.name;
    report.tokens = prep.tokens;
    report.keywords = prep.keywords;
    report.stack = prep.stack;
    report.timesteps = scene.timesteps;
    report.seed = prep.seed;
    report.pb_on = options.pb;
    report.cp_on = options.cp && !options.probe.has_value();
    report.dt_on = options.dt;
    report.probe = options.probe;
    report.cp_k = scene.k;
    report.cp_beta = scene.beta;
    report.topk_hist.assign(static_cast<size_t>(scene.n), 0);

    EmbeddingMatrix balanced;
    if (options.inject_embeddings != nullptr) {
        balanced = prep.global;
    } else if (options.pb) {
        balanced = prompt_balance(prep.global, prep.keywords, prep.tokens, prep.provider);
    } else {
        balanced = prep.global;
    }

    Digest digest;
    digest.add_doubles(balanced.m.data);

    int T = scene.timesteps;
    for (int t = 0; t < T; ++t) {
        double tau = schedule_tau(t, T);
        for (size_t li = 0; li < prep.stack.size(); ++li) {
            const LayerConfig& cfg = prep.stack[li];
            const MaskPyramid::Level& level = prep.pyramid.levels[li];

            Matrix x = synth_query_features(prep.seed, cfg.index, t, cfg.b(), cfg.d_model);

            LayerTuning tuning;
            tuning.tau = tau;
            if (options.dt) tuning.dt = scene.dense;
            if (options.probe) {
                tuning.probe = options.probe;
            } else if (options.cp && scene.k > 0) {
                tuning.cp = CpParams{scene.k, scene.beta};
            }

            LayerResult result = layer_forward(cfg, x, balanced, level, prep.keywords,
                                               prep.weights[li], tuning, prep.tokens.i_end);

            // per-instance responses on the pre-residual feature map
            for (size_t qi = 0; qi < prep.keywords.indices.size(); ++qi) {
                int id = prep.keywords.instance_ids[qi];
                const std::vector<uint8_t>& mask = level.masks.at(id);
                double in_sum = 0.0, out_sum = 0.0;
                size_t in_count = 0, out_count = 0;
                for (int p = 0; p < cfg.b(); ++p) {
                    const double* row = result.feat.row_ptr(p);
                    double row_abs = 0.0;
                    for (int j = 0; j < cfg.d_model; ++j) row_abs += std::fabs(row[j]);
                    if (mask[static_cast<size_t>(p)]) {
                        in_sum += row_abs;
                        in_count += static_cast<size_t>(cfg.d_model);
                    } else {
                        out_sum += row_abs;
                        out_count += static_cast<size_t>(cfg.d_model);
                    }
                }
                ResponseEntry entry;
                entry.t = t;
                entry.layer = cfg.index;
                entry.instance_id = id;
                entry.in_mask = in_count == 0 ? 0.0 : in_sum / static_cast<double>(in_count);
                entry.out_mask = out_count == 0 ? 0.0 : out_sum / static_cast<double>(out_count);
                report.responses.push_back(entry);
                digest.add_double(entry.in_mask);
                digest.add_double(entry.out_mask);
            }

            if (tuning.cp) {
                for (const HeadState& head : result.heads) {
                    for (const std::vector<int>& channel : head.topk) {
                        for (int idx : channel) {
                            report.topk_hist[static_cast<size_t>(idx)] += 1;
                        }
                    }
                }
            }

            if (t == T - 1) {
                for (int token = 0; token <= prep.tokens.i_end; ++token) {
                    AttentionMapExport map;
                    map.layer = cfg.index;
                    map.token = token;
                    map.h = cfg.h;
                    map.w = cfg.w;
                    map.values = head_average_column(result, token);
                    digest.add_doubles(map.values);
                    report.attention_final.push_back(std::move(map));
                }
                if (tuning.cp) {
                    // top-5 concatenated channels by total H activation
                    Matrix concat(cfg.b(), cfg.d_model);
                    int dh = cfg.d_head();
                    for (int h = 0; h < cfg.heads; ++h) {
                        const Matrix& hm = result.heads[static_cast<size_t>(h)].mask.h;
                        for (int p = 0; p < cfg.b(); ++p) {
                            for (int j = 0; j < dh; ++j) {
                                concat(p, h * dh + j) = hm(p, j);
                            }
                        }
                    }
                    std::vector<std::pair<double, int>> totals;
                    totals.reserve(static_cast<size_t>(cfg.d_model));
                    for (int j = 0; j < cfg.d_model; ++j) {
                        double sum = 0.0;
                        for (int p = 0; p < cfg.b(); ++p) sum += concat(p, j);
                        totals.emplace_back(-sum, j);  // descending sum, ascending index
                    }
                    std::sort(totals.begin(), totals.end());
                    int previews = std::min(5, cfg.d_model);
                    for (int r = 0; r < previews; ++r) {
                        MaskPreviewExport preview;
                        preview.layer = cfg.index;
                        preview.rank = r;
                        preview.channel = totals[static_cast<size_t>(r)].second;
                        preview.h = cfg.h;
                        preview.w = cfg.w;
                        preview.values.resize(static_cast<size_t>(cfg.b()));
                        for (int p = 0; p < cfg.b(); ++p) {
                            preview.values[static_cast<size_t>(p)] = concat(p, preview.channel);
                        }
                        digest.add_doubles(preview.values);
                        report.mask_previews.push_back(std::move(preview));
                    }
                }
            }
        }
    }

    for (uint64_t count : report.topk_hist) digest.add_u64(count);
    report.digest = digest.value();
    return report;
}

const std::vector<AblationVariant>& ablation_variants() {
    static const std::vector<AblationVariant> variants = {
        {"none", false, false, false}, {"pb", true, false, false},
        {"dt", false, false, true},    {"cp", false, true, false},
        {"pb+cp", true, true, false},  {"pb+cp+dt", true, true, true},
    };
    return variants;
}

std::vector<RunReport> ablation_matrix(const SceneSpec& scene, int threads) {
    const std::vector<AblationVariant>& variants = ablation_variants();
    std::vector<RunReport> reports(variants.size());

    auto run_variant = [&](size_t i) {
        RunOptions options;
        options.pb = variants[i].pb;
        options.cp = variants[i].cp;
        options.dt = variants[i].dt;
        reports[i] = run(scene, options);
    };

    if (threads <= 1) {
        for (size_t i = 0; i < variants.size(); ++i) run_variant(i);
        return reports;
    }

    std::vector<std::thread> workers;
    std::atomic<size_t> next{0};
    int pool = std::min<int>(threads, static_cast<int>(variants.size()));
    std::vector<std::exception_ptr> failures(static_cast<size_t>(pool));
    for (int w = 0; w < pool; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (size_t i = next.fetch_add(1); i < variants.size(); i = next.fetch_add(1)) {
                    run_variant(i);
                }
            } catch (...) {
                failures[static_cast<size_t>(w)] = std::current_exception();
            }
        });
    }
    for (std::thread& worker : workers) worker.join();
    for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return reports;
}

ProbeReport topk_probe(const SceneSpec& scene, const std::vector<int>& k_values, double factor,
                       std::optional<uint64_t> seed_override) {
    if (factor <= 0.0) throw Error(ErrorKind::ConfigError, "probe: factor must be > 0");

    ProbeReport probe;
    probe.k_values = k_values;
    probe.factor = factor;
    for (const SceneInstance& inst : scene.instances) {
        probe.instance_ids.push_back(inst.id);
        probe.instance_words.push_back(inst.word);
    }

    for (int k : k_values) {
        RunOptions options;
        options.cp = false;
        options.probe = ProbeParams{k, factor};
        options.seed_override = seed_override;
        RunReport report = run(scene, options);
        std::vector<double> row;
        row.reserve(probe.instance_ids.size());
        for (int id : probe.instance_ids) {
            row.push_back(report.aggregate_in_mask(id));
        }
        probe.responses.push_back(std::move(row));
    }
    return probe;
}

}  // namespace t3s2s
