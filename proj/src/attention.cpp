#include "t3s2s/attention.hpp"

#include <algorithm>
#include <cmath>

#include "t3s2s/error.hpp"
#include "t3s2s/rng.hpp"

namespace t3s2s {

namespace {

constexpr uint64_t kWeightDomainQ = 0x51;
constexpr uint64_t kWeightDomainK = 0x4b;
constexpr uint64_t kWeightDomainV = 0x56;

Matrix gaussian_matrix(uint64_t key, int rows, int cols, double scale) {
    GaussianStream stream(key);
    Matrix m(rows, cols);
    for (double& v : m.data) v = stream.next() * scale;
    return m;
}

const std::vector<uint8_t>& level_mask_for(const MaskPyramid::Level& level, int instance_id,
                                           int b) {
    auto it = level.masks.find(instance_id);
    if (it == level.masks.end()) {
        throw Error(ErrorKind::MaskLengthMismatch,
                    "no pyramid mask for instance " + std::to_string(instance_id));
    }
    if (static_cast<int>(it->second.size()) != b) {
        throw Error(ErrorKind::MaskLengthMismatch,
                    "pyramid mask length " + std::to_string(it->second.size()) +
                        " != spatial size " + std::to_string(b));
    }
    return it->second;
}

}  // namespace

void LayerConfig::validate() const {
    if (h < 1 || w < 1) throw Error(ErrorKind::ConfigError, "layer: spatial dims must be >= 1");
    if (heads < 1) throw Error(ErrorKind::ConfigError, "layer: head count must be >= 1");
    if (d_model < 1 || d_model % heads != 0) {
        throw Error(ErrorKind::ConfigError, "layer: d_model must be a positive multiple of heads");
    }
}

ProjectionWeights ProjectionWeights::create(const LayerConfig& cfg, int d_text) {
    cfg.validate();
    if (d_text < 1) throw Error(ErrorKind::ConfigError, "layer: text dimension must be >= 1");
    ProjectionWeights w;
    w.heads.reserve(static_cast<size_t>(cfg.heads));
    int dh = cfg.d_head();
    for (int h = 0; h < cfg.heads; ++h) {
        HeadWeights hw;
        uint64_t base = mix64(cfg.weight_seed, static_cast<uint64_t>(h));
        hw.w_q = gaussian_matrix(mix64(base, kWeightDomainQ), cfg.d_model, dh,
                                 1.0 / std::sqrt(static_cast<double>(cfg.d_model)));
        hw.w_k = gaussian_matrix(mix64(base, kWeightDomainK), d_text, dh,
                                 1.0 / std::sqrt(static_cast<double>(d_text)));
        hw.w_v = gaussian_matrix(mix64(base, kWeightDomainV), d_text, dh,
                                 1.0 / std::sqrt(static_cast<double>(d_text)));
        w.heads.push_back(std::move(hw));
    }
    return w;
}

double DenseTuneParams::strength(double tau) const {
    if (lambda0 < 0.0) throw Error(ErrorKind::ConfigError, "dense tune: lambda0 must be >= 0");
    if (gamma <= 0.0) throw Error(ErrorKind::ConfigError, "dense tune: gamma must be > 0");
    if (tau < 0.0 || tau > 1.0) {
        throw Error(ErrorKind::ConfigError, "dense tune: tau outside [0,1]");
    }
    return lambda0 * std::pow(tau, gamma);
}

HeadProjection project(const Matrix& x, const EmbeddingMatrix& s_b, const HeadWeights& weights) {
    if (x.cols != weights.w_q.rows) {
        throw Error(ErrorKind::DimensionMismatch, "project: query feature dimension");
    }
    if (s_b.d() != weights.w_k.rows || s_b.d() != weights.w_v.rows) {
        throw Error(ErrorKind::DimensionMismatch, "project: text embedding dimension");
    }
    if (!x.all_finite() || !s_b.m.all_finite()) {
        throw Error(ErrorKind::NonFiniteInput, "project: non-finite input");
    }
    HeadProjection p;
    p.q = matmul(x, weights.w_q);
    p.k = matmul(s_b.m, weights.w_k);
    p.v = matmul(s_b.m, weights.w_v);
    return p;
}

Matrix attention_logits(const Matrix& q, const Matrix& k) {
    if (q.cols != k.cols) {
        throw Error(ErrorKind::DimensionMismatch, "attention_logits: head dimensions disagree");
    }
    Matrix logits = matmul_nt(q, k);
    double inv = 1.0 / std::sqrt(static_cast<double>(q.cols));
    for (double& v : logits.data) v *= inv;
    return logits;
}

Matrix dense_tune(const Matrix& logits, const MaskPyramid::Level& level,
                  const KeywordIndices& q, const DenseTuneParams& params, double tau) {
    Matrix out = logits;
    double sigma = params.strength(tau);
    if (sigma <= 0.0 || q.empty()) return out;

    int b = logits.rows;
    for (size_t qi = 0; qi < q.indices.size(); ++qi) {
        int token = q.indices[qi];
        if (token < 0 || token >= logits.cols) {
            throw Error(ErrorKind::MaskLengthMismatch, "dense_tune: keyword column out of range");
        }
        const std::vector<uint8_t>& mask = level_mask_for(level, q.instance_ids[qi], b);

        size_t area = 0;
        for (uint8_t m : mask) area += m;
        double area_ratio = static_cast<double>(area) / static_cast<double>(b);
        // capped at 1 so the pull never leaves the original column range
        double s = std::min(sigma * (1.0 - area_ratio), 1.0);
        if (s <= 0.0) continue;

        double hi = logits(0, token), lo = logits(0, token);
        for (int p = 1; p < b; ++p) {
            hi = std::max(hi, logits(p, token));
            lo = std::min(lo, logits(p, token));
        }
        for (int p = 0; p < b; ++p) {
            double v = logits(p, token);
            double tuned = mask[static_cast<size_t>(p)] ? v + s * (hi - v) : v - s * (v - lo);
            out(p, token) = std::clamp(tuned, lo, hi);
        }
    }
    return out;
}

Matrix softmax_rows(const Matrix& logits) {
    if (!logits.all_finite()) {
        throw Error(ErrorKind::NonFiniteInput, "softmax_rows: non-finite logits");
    }
    Matrix a(logits.rows, logits.cols);
    for (int i = 0; i < logits.rows; ++i) {
        const double* src = logits.row_ptr(i);
        double* dst = a.row_ptr(i);
        double hi = src[0];
        for (int j = 1; j < logits.cols; ++j) hi = std::max(hi, src[j]);
        double sum = 0.0;
        for (int j = 0; j < logits.cols; ++j) {
            dst[j] = std::exp(src[j] - hi);
            sum += dst[j];
        }
        double inv = 1.0 / sum;
        for (int j = 0; j < logits.cols; ++j) dst[j] *= inv;
    }
    return a;
}

Matrix attend(const Matrix& a, const Matrix& v) {
    return matmul(a, v);
}

std::vector<std::vector<int>> topk_value_indices(const Matrix& v, int k, int i_end) {
    if (i_end > v.rows) {
        throw Error(ErrorKind::DimensionMismatch, "topk: i_end exceeds value rows");
    }
    int valid = i_end - 1;  // rows 1..i_end-1
    if (k < 1 || k > valid) {
        throw Error(ErrorKind::KTooLarge,
                    "topk: K=" + std::to_string(k) + " outside [1," + std::to_string(valid) + "]");
    }

    std::vector<std::vector<int>> out(static_cast<size_t>(v.cols));
    std::vector<int> order(static_cast<size_t>(valid));
    for (int j = 0; j < v.cols; ++j) {
        for (int i = 0; i < valid; ++i) order[static_cast<size_t>(i)] = i + 1;
        std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
            double va = std::fabs(v(a, j));
            double vb = std::fabs(v(b, j));
            if (va != vb) return va > vb;
            return a < b;  // ties go to the lower index
        });
        out[static_cast<size_t>(j)].assign(order.begin(), order.begin() + k);
    }
    return out;
}

EnhancementMask characteristics_mask(const std::vector<std::vector<int>>& top_indices,
                                     const KeywordIndices& q, const MaskPyramid::Level& level,
                                     int b) {
    EnhancementMask mask;
    mask.h = Matrix(b, static_cast<int>(top_indices.size()));
    for (size_t j = 0; j < top_indices.size(); ++j) {
        for (int idx : top_indices[j]) {
            int id = q.id_for(idx);
            if (id == 0) continue;
            const std::vector<uint8_t>& u = level_mask_for(level, id, b);
            for (int p = 0; p < b; ++p) {
                mask.h(p, static_cast<int>(j)) += u[static_cast<size_t>(p)];
            }
        }
    }
    return mask;
}

Matrix prominence(const Matrix& f, const EnhancementMask& mask, double beta) {
    if (!f.same_shape(mask.h)) {
        throw Error(ErrorKind::DimensionMismatch, "prominence: mask shape mismatch");
    }
    if (beta < 0.0) throw Error(ErrorKind::ConfigError, "prominence: beta must be >= 0");
    Matrix out(f.rows, f.cols);
    for (size_t i = 0; i < f.data.size(); ++i) {
        // multiplicative form keeps H == 0 cells bit-identical
        out.data[i] = f.data[i] * (1.0 + beta * mask.h.data[i]);
    }
    return out;
}

Matrix amplify_value_topk(const Matrix& v, int k, double factor, int i_end) {
    if (!std::isfinite(factor)) {
        throw Error(ErrorKind::NonFiniteInput, "amplify: factor must be finite");
    }
    if (k == 0) return v;
    Matrix out = v;
    std::vector<std::vector<int>> top = topk_value_indices(v, k, i_end);
    for (size_t j = 0; j < top.size(); ++j) {
        for (int idx : top[j]) {
            out(idx, static_cast<int>(j)) *= factor;
        }
    }
    return out;
}

LayerResult layer_forward(const LayerConfig& cfg, const Matrix& x, const EmbeddingMatrix& s_b,
                          const MaskPyramid::Level& level, const KeywordIndices& q,
                          const ProjectionWeights& weights, const LayerTuning& tuning,
                          int i_end) {
    cfg.validate();
    if (x.rows != cfg.b() || x.cols != cfg.d_model) {
        throw Error(ErrorKind::DimensionMismatch, "layer_forward: query feature shape");
    }
    if (static_cast<int>(weights.heads.size()) != cfg.heads) {
        throw Error(ErrorKind::DimensionMismatch, "layer_forward: weight head count");
    }
    if (level.h != cfg.h || level.w != cfg.w) {
        throw Error(ErrorKind::MaskLengthMismatch, "layer_forward: pyramid level resolution");
    }
    if (tuning.cp && tuning.probe) {
        throw Error(ErrorKind::ConfigError, "layer_forward: CP and probe are exclusive");
    }

    LayerResult result;
    result.heads.reserve(static_cast<size_t>(cfg.heads));
    result.feat = Matrix(cfg.b(), cfg.d_model);

    int dh = cfg.d_head();
    for (int h = 0; h < cfg.heads; ++h) {
        HeadState state;
        HeadProjection proj = project(x, s_b, weights.heads[static_cast<size_t>(h)]);
        state.v = std::move(proj.v);

        state.logits = attention_logits(proj.q, proj.k);
        if (tuning.dt && cfg.dense_tuning) {
            state.logits = dense_tune(state.logits, level, q, *tuning.dt, tuning.tau);
        }
        state.attn = softmax_rows(state.logits);

        if (tuning.probe) {
            Matrix amplified =
                amplify_value_topk(state.v, tuning.probe->k, tuning.probe->factor, i_end);
            state.feat = attend(state.attn, amplified);
        } else {
            state.feat = attend(state.attn, state.v);
        }

        if (tuning.cp && tuning.cp->k > 0) {
            state.topk = topk_value_indices(state.v, tuning.cp->k, i_end);
            state.mask = characteristics_mask(state.topk, q, level, cfg.b());
            state.feat = prominence(state.feat, state.mask, tuning.cp->beta);
        }

        for (int p = 0; p < cfg.b(); ++p) {
            const double* src = state.feat.row_ptr(p);
            double* dst = result.feat.row_ptr(p) + static_cast<size_t>(h) * dh;
            for (int j = 0; j < dh; ++j) dst[j] = src[j];
        }
        result.heads.push_back(std::move(state));
    }

    result.output = x;
    for (size_t i = 0; i < result.output.data.size(); ++i) {
        result.output.data[i] += result.feat.data[i];
    }
    if (!result.output.all_finite()) {
        throw Error(ErrorKind::NonFiniteInput, "layer_forward: non-finite output");
    }
    return result;
}

}  // namespace t3s2s
