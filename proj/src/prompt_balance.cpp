#include "t3s2s/prompt_balance.hpp"

#include <algorithm>
#include <cmath>

#include "t3s2s/error.hpp"

namespace t3s2s {

EmbeddingMatrix prompt_balance(const EmbeddingMatrix& s_g,
                               const KeywordIndices& q,
                               const TokenSequence& tokens,
                               const EmbeddingProvider& provider) {
    if (s_g.n() != tokens.n) {
        throw Error(ErrorKind::DimensionMismatch, "prompt_balance: matrix rows != context length");
    }

    EmbeddingMatrix out;
    out.m = s_g.m;
    out.stage = EmbedStage::balanced;

    if (q.empty()) return out;

    // The energy target is the end-of-text row of the recombined matrix;
    // keyword indices never address i_end, so the row comes over from S_g.
    double target = l2_norm(s_g.m.row_ptr(tokens.i_end), s_g.d());

    for (size_t i = 0; i < q.indices.size(); ++i) {
        int idx = q.indices[i];
        if (idx <= 0 || idx >= tokens.i_end) {
            throw Error(ErrorKind::ConfigError,
                        "prompt_balance: keyword index " + std::to_string(idx) +
                            " outside the word range");
        }
        std::vector<double> s_w = embed_word(tokens.word_at(idx), provider);
        if (static_cast<int>(s_w.size()) != s_g.d()) {
            throw Error(ErrorKind::DimensionMismatch, "prompt_balance: single-word dimension");
        }
        for (double v : s_w) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::NonFiniteEmbedding,
                            "prompt_balance: non-finite embedding for '" + tokens.word_at(idx) +
                                "'");
            }
        }
        double energy = l2_norm(s_w);
        if (energy == 0.0) {
            throw Error(ErrorKind::ZeroEnergyKeyword,
                        "prompt_balance: zero-energy keyword '" + tokens.word_at(idx) + "'");
        }
        double scale = target / energy;
        double* dst = out.m.row_ptr(idx);
        for (int j = 0; j < s_g.d(); ++j) dst[j] = s_w[static_cast<size_t>(j)] * scale;
    }
    return out;
}

std::vector<std::pair<int, double>> energy_profile(const EmbeddingMatrix& s, int i_end) {
    if (i_end >= s.n()) {
        throw Error(ErrorKind::DimensionMismatch, "energy_profile: i_end out of range");
    }
    std::vector<std::pair<int, double>> out;
    out.reserve(static_cast<size_t>(i_end) + 1);
    for (int i = 0; i <= i_end; ++i) {
        out.emplace_back(i, l2_norm(s.m.row_ptr(i), s.d()));
    }
    return out;
}

std::vector<std::pair<int, double>> cosine_profile(const EmbeddingMatrix& s_g,
                                                   const KeywordIndices& q,
                                                   const TokenSequence& tokens,
                                                   const EmbeddingProvider& provider) {
    std::vector<std::pair<int, double>> out;
    out.reserve(q.indices.size());
    for (int idx : q.indices) {
        const double* row = s_g.m.row_ptr(idx);
        std::vector<double> s_w = embed_word(tokens.word_at(idx), provider);
        double nr = l2_norm(row, s_g.d());
        double nw = l2_norm(s_w);
        if (nr == 0.0 || nw == 0.0) {
            throw Error(ErrorKind::ZeroEnergyKeyword,
                        "cosine_profile: zero-energy keyword '" + tokens.word_at(idx) + "'");
        }
        double c = dot(row, s_w.data(), s_g.d()) / (nr * nw);
        out.emplace_back(idx, std::clamp(c, -1.0, 1.0));
    }
    return out;
}

}  // namespace t3s2s
