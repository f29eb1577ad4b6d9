#pragma once

#include <cstdint>
#include <string>

namespace t3s2s {

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

std::string format_u64(uint64_t value);

}  // namespace t3s2s
