#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "t3s2s/embedding.hpp"
#include "t3s2s/keywords.hpp"
#include "t3s2s/matrix.hpp"
#include "t3s2s/sketch.hpp"

namespace t3s2s {

struct LayerConfig {
    int index = 0;
    int h = 0;
    int w = 0;
    int d_model = 0;
    int heads = 1;
    bool dense_tuning = false;
    std::string placement;
    uint64_t weight_seed = 0;

    int b() const { return h * w; }
    int d_head() const { return d_model / heads; }
    void validate() const;  // throws ConfigError
};

struct HeadWeights {
    Matrix w_q;  // d_model x d_head
    Matrix w_k;  // d_text  x d_head
    Matrix w_v;  // d_text  x d_head
};

struct ProjectionWeights {
    std::vector<HeadWeights> heads;

    // Gaussian init scaled by 1/sqrt(fan_in), streams keyed off
    // (cfg.weight_seed, head, matrix role).
    static ProjectionWeights create(const LayerConfig& cfg, int d_text);
};

// b x d_head nonnegative integer mask counting, per cell, how many TopK-hit
// instances cover that position on that channel.
struct EnhancementMask {
    Matrix h;
};

struct DenseTuneParams {
    double lambda0 = 2.5;
    double gamma = 2.0;

    double strength(double tau) const;  // lambda0 * tau^gamma
};

struct CpParams {
    int k = 2;
    double beta = 1.0;
};

struct ProbeParams {
    int k = 0;
    double factor = 1.0;
};

// ---- per-operation surface ----

struct HeadProjection {
    Matrix q;  // b x d_head
    Matrix k;  // n x d_head
    Matrix v;  // n x d_head
};

HeadProjection project(const Matrix& x, const EmbeddingMatrix& s_b, const HeadWeights& weights);

// logits[p][t] = <Q[p], K[t]> / sqrt(d_head)
Matrix attention_logits(const Matrix& q, const Matrix& k);

// Pre-softmax modulation: instance-token columns are pulled toward the
// column max inside the instance mask and toward the column min outside,
// weighted by sigma(tau) * (1 - area ratio), capped so every entry stays
// inside the original column's [min, max].
Matrix dense_tune(const Matrix& logits, const MaskPyramid::Level& level,
                  const KeywordIndices& q, const DenseTuneParams& params, double tau);

Matrix softmax_rows(const Matrix& logits);

Matrix attend(const Matrix& a, const Matrix& v);

// Per channel: the K row indices in [1, i_end) with the largest |value|,
// ordered by descending |value| then ascending index. Ties go to the lower
// index.
std::vector<std::vector<int>> topk_value_indices(const Matrix& v, int k, int i_end);

EnhancementMask characteristics_mask(const std::vector<std::vector<int>>& top_indices,
                                     const KeywordIndices& q, const MaskPyramid::Level& level,
                                     int b);

// F_hat[p][j] = F[p][j] * (1 + beta * H[p][j]); untouched cells stay
// bit-identical.
Matrix prominence(const Matrix& f, const EnhancementMask& mask, double beta);

// Diagnostic probe: multiply each channel's K largest-|value| valid-row
// entries by factor.
Matrix amplify_value_topk(const Matrix& v, int k, double factor, int i_end);

// ---- composed layer ----

struct LayerTuning {
    std::optional<CpParams> cp;
    std::optional<ProbeParams> probe;
    std::optional<DenseTuneParams> dt;  // engaged only on layers with cfg.dense_tuning
    double tau = 0.0;
};

struct HeadState {
    Matrix logits;  // post-tune when DT ran
    Matrix attn;
    Matrix v;
    Matrix feat;  // pre-residual, post-CP
    EnhancementMask mask;
    std::vector<std::vector<int>> topk;  // filled when CP ran
};

struct LayerResult {
    std::vector<HeadState> heads;
    Matrix feat;    // b x d_model, heads concatenated in index order
    Matrix output;  // x + feat
};

LayerResult layer_forward(const LayerConfig& cfg, const Matrix& x, const EmbeddingMatrix& s_b,
                          const MaskPyramid::Level& level, const KeywordIndices& q,
                          const ProjectionWeights& weights, const LayerTuning& tuning,
                          int i_end);

}  // namespace t3s2s
