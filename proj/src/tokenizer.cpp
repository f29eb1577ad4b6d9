#include "t3s2s/tokenizer.hpp"

#include <cctype>

#include "t3s2s/error.hpp"

namespace t3s2s {

std::string TokenSequence::token_name(int idx) const {
    if (idx == 0) return "<bos>";
    if (idx == i_end) return "<eos>";
    if (idx > 0 && idx < i_end) return word_at(idx);
    return "<pad>";
}

TokenSequence tokenize(const std::string& text, int n) {
    if (n < 2) {
        throw Error(ErrorKind::ConfigError, "tokenize: context length must be at least 2");
    }
    for (unsigned char c : text) {
        if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') {
            throw Error(ErrorKind::ParseError, "tokenize: text contains non-printable characters");
        }
    }

    std::vector<std::string> words;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            words.push_back(current);
            current.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (c < 0x80 && std::ispunct(c)) {
            // stripped, not a separator: "world's" -> "worlds"
        } else {
            current.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    flush();

    if (static_cast<int>(words.size()) + 2 > n) {
        throw Error(ErrorKind::TooManyTokens,
                    "tokenize: " + std::to_string(words.size()) +
                        " words do not fit a context of " + std::to_string(n));
    }

    TokenSequence seq;
    seq.n = n;
    seq.i_end = static_cast<int>(words.size()) + 1;
    seq.words = std::move(words);
    return seq;
}

}  // namespace t3s2s
