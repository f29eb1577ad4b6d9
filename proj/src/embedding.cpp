#include "t3s2s/embedding.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "t3s2s/error.hpp"
#include "t3s2s/rng.hpp"

namespace t3s2s {

namespace {

constexpr uint64_t kNormDomain = 0xa5a5a5a5a5a5a5a5ull;

std::vector<double> synthetic_vector(const std::string& token, uint64_t seed, int d) {
    GaussianStream stream(hash64(token, seed));
    std::vector<double> v(static_cast<size_t>(d));
    double norm = 0.0;
    do {
        for (int i = 0; i < d; ++i) v[static_cast<size_t>(i)] = stream.next();
        norm = l2_norm(v);
    } while (norm == 0.0);

    double target;
    if (token == kBosToken) {
        target = 1.0;
    } else if (token == kEosToken) {
        target = 1.5;
    } else {
        uint64_t bits = hash64(token, seed ^ kNormDomain);
        target = 0.7 + 0.5 * (static_cast<double>(bits >> 11) * 0x1.0p-53);
    }
    double scale = target / norm;
    for (double& x : v) x *= scale;
    return v;
}

}  // namespace

EmbeddingProvider EmbeddingProvider::synthetic(uint64_t seed, int d) {
    if (d < 1) throw Error(ErrorKind::ConfigError, "embedding dimension must be positive");
    EmbeddingProvider p;
    p.mode = Mode::synthetic;
    p.seed = seed;
    p.d = d;
    return p;
}

EmbeddingProvider EmbeddingProvider::from_file(const std::string& path, int d) {
    if (d < 1) throw Error(ErrorKind::ConfigError, "embedding dimension must be positive");
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot open embedding file: " + path);

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, "embedding file: " + std::string(e.what()));
    }
    if (!doc.is_object()) {
        throw Error(ErrorKind::ParseError, "embedding file must be a JSON object");
    }

    EmbeddingProvider p;
    p.mode = Mode::file;
    p.d = d;
    p.path = path;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_array()) {
            throw Error(ErrorKind::ParseError, "embedding entry '" + key + "' is not an array");
        }
        if (static_cast<int>(value.size()) != d) {
            throw Error(ErrorKind::DimensionMismatch,
                        "embedding entry '" + key + "' has dimension " +
                            std::to_string(value.size()) + ", provider expects " +
                            std::to_string(d));
        }
        std::vector<double> vec;
        vec.reserve(value.size());
        for (const auto& x : value) {
            if (!x.is_number()) {
                throw Error(ErrorKind::ParseError, "embedding entry '" + key + "' is not numeric");
            }
            double xv = x.get<double>();
            if (!std::isfinite(xv)) {
                throw Error(ErrorKind::NonFiniteEmbedding,
                            "embedding entry '" + key + "' contains a non-finite value");
            }
            vec.push_back(xv);
        }
        p.table.emplace(key, std::move(vec));
    }
    return p;
}

std::vector<double> EmbeddingProvider::token_vector(const std::string& token) const {
    if (mode == Mode::synthetic) {
        return synthetic_vector(token, seed, d);
    }
    auto it = table.find(token);
    if (it == table.end()) {
        throw Error(ErrorKind::MissingEmbedding, "no embedding for '" + token + "'");
    }
    return it->second;
}

std::vector<double> EmbeddingProvider::word_vector(const std::string& word) const {
    if (mode == Mode::synthetic) {
        return synthetic_vector(word, seed, d);
    }
    auto it = table.find(word + "@single");
    if (it != table.end()) return it->second;
    return token_vector(word);
}

EmbeddingMatrix embed(const TokenSequence& tokens, const EmbeddingProvider& provider) {
    EmbeddingMatrix out;
    out.stage = EmbedStage::global;
    out.m = Matrix(tokens.n, provider.d);

    auto put_row = [&](int row, const std::vector<double>& v) {
        if (static_cast<int>(v.size()) != provider.d) {
            throw Error(ErrorKind::DimensionMismatch, "embedding row dimension mismatch");
        }
        double* dst = out.m.row_ptr(row);
        for (int j = 0; j < provider.d; ++j) dst[j] = v[static_cast<size_t>(j)];
    };

    put_row(0, provider.token_vector(kBosToken));
    for (int idx = 1; idx < tokens.i_end; ++idx) {
        put_row(idx, provider.token_vector(tokens.word_at(idx)));
    }
    std::vector<double> eos = provider.token_vector(kEosToken);
    // padding mirrors common frozen encoders: every slot past the prompt
    // carries the end-of-text vector
    for (int idx = tokens.i_end; idx < tokens.n; ++idx) {
        put_row(idx, eos);
    }
    return out;
}

std::vector<double> embed_word(const std::string& word, const EmbeddingProvider& provider) {
    if (word.empty()) {
        throw Error(ErrorKind::ConfigError, "embed_word: empty word");
    }
    return provider.word_vector(word);
}

}  // namespace t3s2s
