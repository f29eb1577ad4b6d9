#pragma once

#include <utility>
#include <vector>

#include "t3s2s/embedding.hpp"
#include "t3s2s/keywords.hpp"

namespace t3s2s {

// Replaces every keyword row of S_g with its standalone single-word vector
// rescaled so its L2 norm matches the end-of-text row; all other rows are
// carried over bit-identically.
EmbeddingMatrix prompt_balance(const EmbeddingMatrix& s_g,
                               const KeywordIndices& q,
                               const TokenSequence& tokens,
                               const EmbeddingProvider& provider);

// Per-token L2 norms for indices 0..i_end.
std::vector<std::pair<int, double>> energy_profile(const EmbeddingMatrix& s, int i_end);

// Per-keyword cosine between the in-context row and the standalone vector.
std::vector<std::pair<int, double>> cosine_profile(const EmbeddingMatrix& s_g,
                                                   const KeywordIndices& q,
                                                   const TokenSequence& tokens,
                                                   const EmbeddingProvider& provider);

}  // namespace t3s2s
