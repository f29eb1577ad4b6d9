#pragma once

#include <cstdint>
#include <string_view>

namespace t3s2s {

// 64-bit keyed string hash (FNV-1a folded through a splitmix finalizer).
// Stable across platforms; used to key every deterministic stream.
uint64_t hash64(std::string_view text, uint64_t seed);

// Combine two 64-bit keys into a new stream key.
uint64_t mix64(uint64_t a, uint64_t b);

// splitmix64: tiny, portable, bit-exact everywhere.
struct SplitMix64 {
    uint64_t state = 0;

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform double in (0, 1]
    double next_unit() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }
};

// Standard-normal stream via Box-Muller. std::normal_distribution is
// implementation-defined, which would break the bit-exact determinism
// contract, so we roll our own on top of splitmix64.
class GaussianStream {
  public:
    explicit GaussianStream(uint64_t key) : rng_{key} {}

    double next();

  private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace t3s2s
