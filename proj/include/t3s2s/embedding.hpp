#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "t3s2s/matrix.hpp"
#include "t3s2s/tokenizer.hpp"

namespace t3s2s {

enum class EmbedStage { global, recombined, balanced };

struct EmbeddingMatrix {
    Matrix m;  // n x d
    EmbedStage stage = EmbedStage::global;

    int n() const { return m.rows; }
    int d() const { return m.cols; }
};

// Deterministic stand-in for a frozen text encoder. Synthetic mode hashes
// (word, seed) into a unit Gaussian direction and pins the norms:
// <bos> = 1.0, <eos> = 1.5, words land in [0.7, 1.2]. File mode reads a JSON
// table of word -> vector, with optional "word@single" standalone entries.
struct EmbeddingProvider {
    enum class Mode { synthetic, file };

    Mode mode = Mode::synthetic;
    uint64_t seed = 0;
    int d = 0;
    std::string path;
    std::map<std::string, std::vector<double>> table;  // file mode only

    static EmbeddingProvider synthetic(uint64_t seed, int d);
    static EmbeddingProvider from_file(const std::string& path, int d);

    // vector for a token slot; accepts "<bos>" / "<eos>" / plain words
    std::vector<double> token_vector(const std::string& token) const;
    // standalone single-word encoding ("word@single" wins in file mode)
    std::vector<double> word_vector(const std::string& word) const;
};

EmbeddingMatrix embed(const TokenSequence& tokens, const EmbeddingProvider& provider);
std::vector<double> embed_word(const std::string& word, const EmbeddingProvider& provider);

inline const char* kBosToken = "<bos>";
inline const char* kEosToken = "<eos>";

}  // namespace t3s2s
