#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "t3s2s/attention.hpp"
#include "t3s2s/scene.hpp"

namespace t3s2s {

// Stand-in for UNet intermediate features: a standard-Gaussian b x d matrix
// keyed by (seed, layer index, timestep).
Matrix synth_query_features(uint64_t seed, int layer_index, int timestep, int b, int d);

// Normalized time for step t of T: runs 1 -> 0 linearly; T == 1 pins 0.
double schedule_tau(int t, int timesteps);

struct RunOptions {
    bool pb = true;
    bool cp = true;
    bool dt = true;
    std::optional<ProbeParams> probe;       // replaces CP when set
    std::optional<uint64_t> seed_override;  // overrides scene.seed
    const EmbeddingMatrix* inject_embeddings = nullptr;  // bypasses embed+balance
};

struct ResponseEntry {
    int t = 0;
    int layer = 0;
    int instance_id = 0;
    double in_mask = 0.0;   // mean |feat| over in-mask positions, all channels
    double out_mask = 0.0;  // same over the complement
};

struct AttentionMapExport {
    int layer = 0;
    int token = 0;
    int h = 0;
    int w = 0;
    std::vector<double> values;  // head-averaged attention column, length h*w
};

struct MaskPreviewExport {
    int layer = 0;
    int rank = 0;
    int channel = 0;  // concatenated channel index
    int h = 0;
    int w = 0;
    std::vector<double> values;
};

struct RunReport {
    std::string scene_name;
    TokenSequence tokens;
    KeywordIndices keywords;
    std::vector<LayerConfig> stack;
    int timesteps = 0;
    uint64_t seed = 0;
    bool pb_on = true, cp_on = true, dt_on = true;
    std::optional<ProbeParams> probe;
    int cp_k = 0;
    double cp_beta = 0.0;

    std::vector<ResponseEntry> responses;          // t-major, then layer, then keyword order
    std::vector<uint64_t> topk_hist;               // token index -> count, length n
    std::vector<AttentionMapExport> attention_final;  // final timestep only
    std::vector<MaskPreviewExport> mask_previews;     // final timestep, top-5 H channels per layer
    uint64_t digest = 0;

    double aggregate_in_mask(int instance_id) const;   // mean over (t, layer)
    double aggregate_out_mask(int instance_id) const;
};

RunReport run(const SceneSpec& scene, const RunOptions& options = {});

// Six fixed variants mirroring the module on/off grid:
// none, pb, dt, cp, pb+cp, pb+cp+dt.
struct AblationVariant {
    std::string name;
    bool pb = false, cp = false, dt = false;
};
const std::vector<AblationVariant>& ablation_variants();

std::vector<RunReport> ablation_matrix(const SceneSpec& scene, int threads = 1);

struct ProbeReport {
    std::vector<int> k_values;
    double factor = 1.0;
    std::vector<int> instance_ids;
    std::vector<std::string> instance_words;
    // responses[i][j]: aggregate in-mask response for k_values[i], instance j
    std::vector<std::vector<double>> responses;
};

ProbeReport topk_probe(const SceneSpec& scene, const std::vector<int>& k_values, double factor,
                       std::optional<uint64_t> seed_override = {});

}  // namespace t3s2s
