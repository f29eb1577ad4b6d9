#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "t3s2s/csv.hpp"
#include "t3s2s/rng.hpp"

using namespace t3s2s;

TEST_CASE("format_double round-trips exactly") {
    SplitMix64 rng{21};
    GaussianStream g(rng.next());
    for (int i = 0; i < 2000; ++i) {
        double v = g.next() * std::pow(10.0, static_cast<double>(static_cast<int>(rng.next() % 17)) - 8.0);
        std::string s = format_double(v);
        double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.5) == "1.5");
    CHECK(format_double(-2.0) == "-2");
}

TEST_CASE("format_u64 covers the full range") {
    CHECK(format_u64(0) == "0");
    CHECK(format_u64(18446744073709551615ull) == "18446744073709551615");
}
