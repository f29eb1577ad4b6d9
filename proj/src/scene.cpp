#include "t3s2s/scene.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "t3s2s/error.hpp"
#include "t3s2s/rng.hpp"
#include "t3s2s/tokenizer.hpp"

namespace t3s2s {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class FieldErrors {
  public:
    void add(const std::string& path, const std::string& message) {
        lines_.push_back(path + ": " + message);
    }
    void raise_if_any() const {
        if (lines_.empty()) return;
        std::string all;
        for (const auto& l : lines_) {
            if (!all.empty()) all += "\n";
            all += l;
        }
        throw Error(ErrorKind::ConfigError, all);
    }

  private:
    std::vector<std::string> lines_;
};

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& known, FieldErrors& errors) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) errors.add(path + "." + key, "unknown field");
    }
}

bool dense_default_for(const std::string& placement) {
    return placement == "down_2" || placement == "mid_0";
}

std::vector<StackLayerSpec> default_stack_layers() {
    return {
        {"down_0", 32, 32, 64, 2, {}},
        {"down_2", 16, 16, 128, 2, {}},
        {"mid_0", 8, 8, 128, 2, {}},
        {"up_1", 16, 16, 128, 2, {}},
        {"up_0", 32, 32, 64, 2, {}},
    };
}

}  // namespace

void SceneSpec::validate() const {
    FieldErrors errors;
    if (prompt.empty()) errors.add("$.prompt", "must be a non-empty string");
    if (n < 2) errors.add("$.n", "context length must be >= 2");
    if (k < 0) errors.add("$.k", "must be >= 0");
    if (beta < 0.0) errors.add("$.beta", "must be >= 0");
    if (timesteps < 1) errors.add("$.timesteps", "must be >= 1");
    if (d < 1) errors.add("$.provider.d", "must be >= 1");
    if (dense.lambda0 < 0.0) errors.add("$.dense.lambda0", "must be >= 0");
    if (dense.gamma <= 0.0) errors.add("$.dense.gamma", "must be > 0");
    if (provider_mode != "synthetic" && provider_mode != "file") {
        errors.add("$.provider.mode", "must be 'synthetic' or 'file'");
    }
    if (provider_mode == "file" && provider_path.empty()) {
        errors.add("$.provider.path", "required in file mode");
    }

    bool any_per_instance = false, all_per_instance = true;
    std::set<int> ids;
    std::set<std::string> words;
    for (size_t i = 0; i < instances.size(); ++i) {
        std::string path = "$.instances[" + std::to_string(i) + "]";
        const SceneInstance& inst = instances[i];
        if (inst.word.empty()) errors.add(path + ".word", "must be non-empty");
        if (inst.id < 1 || inst.id > 255) errors.add(path + ".id", "must be in [1,255]");
        if (!ids.insert(inst.id).second) errors.add(path + ".id", "duplicate instance id");
        if (!words.insert(inst.word).second) errors.add(path + ".word", "duplicate keyword");
        if (inst.sketch_path.empty()) {
            all_per_instance = false;
        } else {
            any_per_instance = true;
        }
    }
    if (any_per_instance && !all_per_instance) {
        errors.add("$.instances", "per-instance sketches must cover every instance");
    }
    if (!any_per_instance && sketch_path.empty() && !instances.empty()) {
        errors.add("$.sketch", "required unless every instance carries its own sketch");
    }

    // every keyword must appear in the prompt exactly once
    if (!prompt.empty() && n >= 2) {
        try {
            TokenSequence tokens = tokenize(prompt, n);
            for (size_t i = 0; i < instances.size(); ++i) {
                int hits = 0;
                for (int idx = 1; idx < tokens.i_end; ++idx) {
                    if (tokens.word_at(idx) == instances[i].word) ++hits;
                }
                if (hits != 1) {
                    errors.add("$.instances[" + std::to_string(i) + "].word",
                               "must occur in the prompt exactly once (found " +
                                   std::to_string(hits) + ")");
                }
            }
        } catch (const Error& e) {
            errors.add("$.prompt", e.what());
        }
    }

    if (stack_name != "default" && stack_layers.empty()) {
        errors.add("$.stack", "must be 'default' or an explicit layer list");
    }
    for (size_t i = 0; i < stack_layers.size(); ++i) {
        std::string path = "$.stack[" + std::to_string(i) + "]";
        const StackLayerSpec& l = stack_layers[i];
        if (l.h < 1 || l.w < 1) errors.add(path, "spatial dims must be >= 1");
        if (l.heads < 1 || l.d < 1 || l.d % l.heads != 0) {
            errors.add(path + ".d", "must be a positive multiple of heads");
        }
    }
    errors.raise_if_any();
}

SceneSpec parse_scene_text(const std::string& text, const std::string& base_dir,
                           const std::string& fallback_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is the offset of the offending character
        throw Error(ErrorKind::ParseError,
                    "scene: parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::ConfigError, "$: scene must be a JSON object");

    FieldErrors errors;
    SceneSpec scene;
    scene.base_dir = base_dir;
    scene.name = fallback_name;

    reject_unknown(doc, "$",
                   {"name", "prompt", "n", "instances", "sketch", "provider", "k", "beta",
                    "dense", "timesteps", "seed", "stack"},
                   errors);

    auto get_string = [&](const json& obj, const char* key, const std::string& path,
                          std::string& out) {
        if (!obj.contains(key)) return;
        if (!obj[key].is_string()) {
            errors.add(path, "must be a string");
            return;
        }
        out = obj[key].get<std::string>();
    };
    auto get_int = [&](const json& obj, const char* key, const std::string& path, int& out) {
        if (!obj.contains(key)) return;
        if (!obj[key].is_number_integer()) {
            errors.add(path, "must be an integer");
            return;
        }
        out = obj[key].get<int>();
    };
    auto get_u64 = [&](const json& obj, const char* key, const std::string& path, uint64_t& out) {
        if (!obj.contains(key)) return;
        if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer()) {
            errors.add(path, "must be a non-negative integer");
            return;
        }
        if (obj[key].is_number_integer() && obj[key].get<int64_t>() < 0) {
            errors.add(path, "must be a non-negative integer");
            return;
        }
        out = obj[key].get<uint64_t>();
    };
    auto get_double = [&](const json& obj, const char* key, const std::string& path, double& out) {
        if (!obj.contains(key)) return;
        if (!obj[key].is_number()) {
            errors.add(path, "must be a number");
            return;
        }
        out = obj[key].get<double>();
    };

    get_string(doc, "name", "$.name", scene.name);
    get_string(doc, "prompt", "$.prompt", scene.prompt);
    get_int(doc, "n", "$.n", scene.n);
    get_string(doc, "sketch", "$.sketch", scene.sketch_path);
    get_int(doc, "k", "$.k", scene.k);
    get_double(doc, "beta", "$.beta", scene.beta);
    get_int(doc, "timesteps", "$.timesteps", scene.timesteps);
    get_u64(doc, "seed", "$.seed", scene.seed);

    if (doc.contains("provider")) {
        const json& prov = doc["provider"];
        if (!prov.is_object()) {
            errors.add("$.provider", "must be an object");
        } else {
            reject_unknown(prov, "$.provider", {"mode", "seed", "d", "path"}, errors);
            get_string(prov, "mode", "$.provider.mode", scene.provider_mode);
            get_u64(prov, "seed", "$.provider.seed", scene.provider_seed);
            get_int(prov, "d", "$.provider.d", scene.d);
            get_string(prov, "path", "$.provider.path", scene.provider_path);
        }
    }

    if (doc.contains("dense")) {
        const json& dense = doc["dense"];
        if (!dense.is_object()) {
            errors.add("$.dense", "must be an object");
        } else {
            reject_unknown(dense, "$.dense", {"lambda0", "gamma"}, errors);
            get_double(dense, "lambda0", "$.dense.lambda0", scene.dense.lambda0);
            get_double(dense, "gamma", "$.dense.gamma", scene.dense.gamma);
        }
    }

    if (doc.contains("instances")) {
        if (!doc["instances"].is_array()) {
            errors.add("$.instances", "must be an array");
        } else {
            int i = 0;
            for (const json& item : doc["instances"]) {
                std::string path = "$.instances[" + std::to_string(i) + "]";
                SceneInstance inst;
                if (!item.is_object()) {
                    errors.add(path, "must be an object");
                } else {
                    reject_unknown(item, path, {"word", "id", "sketch", "color"}, errors);
                    get_string(item, "word", path + ".word", inst.word);
                    get_int(item, "id", path + ".id", inst.id);
                    get_string(item, "sketch", path + ".sketch", inst.sketch_path);
                    if (item.contains("color")) {
                        const json& col = item["color"];
                        if (!col.is_array() || col.size() != 3 || !col[0].is_number_integer() ||
                            !col[1].is_number_integer() || !col[2].is_number_integer()) {
                            errors.add(path + ".color", "must be an [r,g,b] byte triple");
                        } else {
                            int r = col[0].get<int>(), g = col[1].get<int>(), b = col[2].get<int>();
                            if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) {
                                errors.add(path + ".color", "components must be bytes");
                            } else {
                                inst.color = std::array<uint8_t, 3>{
                                    static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                                    static_cast<uint8_t>(b)};
                            }
                        }
                    }
                }
                scene.instances.push_back(std::move(inst));
                ++i;
            }
        }
    }

    if (doc.contains("stack")) {
        const json& stack = doc["stack"];
        if (stack.is_string()) {
            scene.stack_name = stack.get<std::string>();
        } else if (stack.is_array()) {
            scene.stack_name.clear();
            int i = 0;
            for (const json& item : stack) {
                std::string path = "$.stack[" + std::to_string(i) + "]";
                StackLayerSpec layer;
                if (!item.is_object()) {
                    errors.add(path, "must be an object");
                } else {
                    reject_unknown(item, path, {"placement", "h", "w", "d", "heads", "dense"},
                                   errors);
                    get_string(item, "placement", path + ".placement", layer.placement);
                    get_int(item, "h", path + ".h", layer.h);
                    get_int(item, "w", path + ".w", layer.w);
                    get_int(item, "d", path + ".d", layer.d);
                    get_int(item, "heads", path + ".heads", layer.heads);
                    if (item.contains("dense")) {
                        if (!item["dense"].is_boolean()) {
                            errors.add(path + ".dense", "must be a boolean");
                        } else {
                            layer.dense = item["dense"].get<bool>();
                        }
                    }
                }
                scene.stack_layers.push_back(std::move(layer));
                ++i;
            }
        } else {
            errors.add("$.stack", "must be a name or a layer array");
        }
    }

    errors.raise_if_any();
    scene.validate();
    return scene;
}

SceneSpec load_scene(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot open scene file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    fs::path p(path);
    return parse_scene_text(buf.str(), p.parent_path().string(), p.stem().string());
}

std::vector<LayerConfig> make_stack(const SceneSpec& scene, uint64_t run_seed) {
    std::vector<StackLayerSpec> specs =
        scene.stack_layers.empty() ? default_stack_layers() : scene.stack_layers;

    std::vector<LayerConfig> stack;
    stack.reserve(specs.size());
    int index = 0;
    for (const StackLayerSpec& spec : specs) {
        LayerConfig cfg;
        cfg.index = index;
        cfg.h = spec.h;
        cfg.w = spec.w;
        cfg.d_model = spec.d;
        cfg.heads = spec.heads;
        cfg.placement = spec.placement;
        cfg.dense_tuning = spec.dense.value_or(dense_default_for(spec.placement));
        cfg.weight_seed = mix64(run_seed, static_cast<uint64_t>(index));
        cfg.validate();
        stack.push_back(std::move(cfg));
        ++index;
    }
    return stack;
}

}  // namespace t3s2s
