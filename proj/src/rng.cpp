#include "t3s2s/rng.hpp"

#include <cmath>
#include <numbers>

namespace t3s2s {

namespace {

uint64_t avalanche(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

uint64_t hash64(std::string_view text, uint64_t seed) {
    uint64_t h = 1469598103934665603ull ^ avalanche(seed);
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return avalanche(h);
}

uint64_t mix64(uint64_t a, uint64_t b) {
    return avalanche(a + 0x9e3779b97f4a7c15ull * (b + 1));
}

double GaussianStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = rng_.next_unit();
    double u2 = rng_.next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

}  // namespace t3s2s
