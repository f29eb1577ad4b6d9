#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "t3s2s/attention.hpp"

namespace t3s2s {

struct SceneInstance {
    std::string word;
    int id = 0;
    std::string sketch_path;                         // per-instance mask (overlap scenes)
    std::optional<std::array<uint8_t, 3>> color;     // PPM color-table entry
};

struct StackLayerSpec {
    std::string placement;
    int h = 0;
    int w = 0;
    int d = 0;
    int heads = 2;
    std::optional<bool> dense;  // default: on for down_2 / mid_0
};

struct SceneSpec {
    std::string name;
    std::string prompt;
    int n = 77;
    std::vector<SceneInstance> instances;
    std::string sketch_path;

    std::string provider_mode = "synthetic";
    uint64_t provider_seed = 0;
    int d = 64;
    std::string provider_path;

    int k = 2;
    double beta = 1.0;
    DenseTuneParams dense;
    int timesteps = 8;
    uint64_t seed = 0;

    std::string stack_name = "default";
    std::vector<StackLayerSpec> stack_layers;

    std::string base_dir;  // directory of the scene file, for relative paths

    // throws ConfigError listing every violated field by path
    void validate() const;
};

// Parses and validates; unknown fields are rejected with their JSON path.
SceneSpec load_scene(const std::string& path);
SceneSpec parse_scene_text(const std::string& text, const std::string& base_dir,
                           const std::string& fallback_name);

std::vector<LayerConfig> make_stack(const SceneSpec& scene, uint64_t run_seed);

}  // namespace t3s2s
