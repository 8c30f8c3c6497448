#pragma once

#include <charconv>
#include <string>

namespace spiked::detail {

// Shortest round-trippable text for a double; CSV output is byte-stable.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace spiked::detail
