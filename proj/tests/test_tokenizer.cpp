#include <doctest.h>

#include "t3s2s/error.hpp"
#include "t3s2s/tokenizer.hpp"

using namespace t3s2s;

namespace {
const char* kScenePrompt =
    "Isometric view of game scene, a plain, walk path, a river, a high mountain, houses.";
}

TEST_CASE("tokenize lays out words between the specials") {
    TokenSequence seq = tokenize("a river", 8);
    CHECK(seq.words == std::vector<std::string>{"a", "river"});
    CHECK(seq.i_end == 3);
    CHECK(seq.n == 8);
    CHECK(seq.token_name(0) == "<bos>");
    CHECK(seq.token_name(1) == "a");
    CHECK(seq.token_name(2) == "river");
    CHECK(seq.token_name(3) == "<eos>");
    CHECK(seq.token_name(4) == "<pad>");
}

TEST_CASE("tokenize strips punctuation and lowercases") {
    TokenSequence seq = tokenize(kScenePrompt, 77);
    CHECK(seq.words.size() == 15);
    CHECK(seq.i_end == 16);
    CHECK(seq.word_at(1) == "isometric");
    CHECK(seq.word_at(5) == "scene");
    CHECK(seq.word_at(7) == "plain");
    CHECK(seq.word_at(9) == "path");
    CHECK(seq.word_at(11) == "river");
    CHECK(seq.word_at(14) == "mountain");
    CHECK(seq.word_at(15) == "houses");
}

TEST_CASE("tokenize of an empty prompt") {
    TokenSequence seq = tokenize("", 4);
    CHECK(seq.words.empty());
    CHECK(seq.i_end == 1);
}

TEST_CASE("tokenize rejects prompts that do not fit") {
    CHECK_THROWS_AS(tokenize("one two three", 4), Error);
    try {
        tokenize("one two three", 4);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooManyTokens);
    }
    // exactly full is fine: 3 words + bos + eos = 5
    CHECK(tokenize("one two three", 5).i_end == 4);
}

TEST_CASE("tokenize keeps punctuation-only tokens out") {
    TokenSequence seq = tokenize("a -- b ...", 8);
    CHECK(seq.words == std::vector<std::string>{"a", "b"});
}

TEST_CASE("tokenize rejects control characters") {
    CHECK_THROWS_AS(tokenize(std::string("bad\x01prompt"), 8), Error);
}
