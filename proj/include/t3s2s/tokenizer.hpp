#pragma once

#include <string>
#include <vector>

namespace t3s2s {

// Word-level token slots: index 0 is <bos>, words sit at 1..i_end-1,
// <eos> at i_end, everything past i_end is padding.
struct TokenSequence {
    std::vector<std::string> words;
    int i_end = 1;
    int n = 0;

    // token index -> word (only valid for 1 <= idx < i_end)
    const std::string& word_at(int idx) const { return words[static_cast<size_t>(idx) - 1]; }

    // printable name for any slot, specials included
    std::string token_name(int idx) const;
};

// Lowercases, strips punctuation, splits on whitespace and lays the words
// into an n-slot sequence. Throws TooManyTokens when words + specials > n.
TokenSequence tokenize(const std::string& text, int n);

}  // namespace t3s2s
