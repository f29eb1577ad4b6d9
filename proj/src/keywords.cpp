#include "t3s2s/keywords.hpp"

#include <algorithm>
#include <map>

#include "t3s2s/error.hpp"

namespace t3s2s {

bool KeywordIndices::contains(int token_index) const {
    return std::binary_search(indices.begin(), indices.end(), token_index);
}

int KeywordIndices::id_for(int token_index) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), token_index);
    if (it == indices.end() || *it != token_index) return 0;
    return instance_ids[static_cast<size_t>(it - indices.begin())];
}

KeywordIndices extract_keywords(const TokenSequence& tokens,
                                const std::set<std::string>& lexicon,
                                const std::vector<std::pair<std::string, int>>* overrides) {
    KeywordIndices out;

    if (overrides != nullptr && !overrides->empty()) {
        std::map<int, int> by_index;
        for (const auto& [word, id] : *overrides) {
            int found = -1;
            for (int idx = 1; idx < tokens.i_end; ++idx) {
                if (tokens.word_at(idx) == word) {
                    if (found >= 0) {
                        throw Error(ErrorKind::AmbiguousKeyword,
                                    "keyword '" + word + "' occurs more than once");
                    }
                    found = idx;
                }
            }
            if (found < 0) {
                throw Error(ErrorKind::KeywordNotFound,
                            "keyword '" + word + "' not present in prompt");
            }
            if (by_index.count(found)) {
                throw Error(ErrorKind::AmbiguousKeyword,
                            "token index " + std::to_string(found) + " bound twice");
            }
            by_index[found] = id;
        }
        std::set<int> seen_ids;
        for (const auto& [idx, id] : by_index) {
            if (!seen_ids.insert(id).second) {
                throw Error(ErrorKind::AmbiguousKeyword,
                            "instance id " + std::to_string(id) + " bound to two token indices");
            }
            out.indices.push_back(idx);
            out.instance_ids.push_back(id);
        }
        return out;
    }

    int next_id = 1;
    for (int idx = 1; idx < tokens.i_end; ++idx) {
        if (lexicon.count(tokens.word_at(idx))) {
            out.indices.push_back(idx);
            out.instance_ids.push_back(next_id++);
        }
    }
    if (out.indices.empty()) out.warning_no_keywords = true;
    return out;
}

}  // namespace t3s2s
