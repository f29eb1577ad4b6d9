#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "t3s2s/tokenizer.hpp"

namespace t3s2s {

// Instance keyword positions within a TokenSequence. indices is strictly
// increasing; instance_ids runs parallel to it.
struct KeywordIndices {
    std::vector<int> indices;
    std::vector<int> instance_ids;
    bool warning_no_keywords = false;

    bool empty() const { return indices.empty(); }
    size_t size() const { return indices.size(); }
    bool contains(int token_index) const;
    // instance id bound to a token index, or 0 when the index is not a keyword
    int id_for(int token_index) const;
};

// Scene-config overrides are authoritative when given; otherwise keywords are
// the lexicon hits in token order with ids assigned 1,2,...
KeywordIndices extract_keywords(const TokenSequence& tokens,
                                const std::set<std::string>& lexicon,
                                const std::vector<std::pair<std::string, int>>* overrides = nullptr);

// Bundled scene-noun list (~200 entries, plural forms spelled out).
const std::set<std::string>& default_lexicon();

}  // namespace t3s2s
