#pragma once

#include <cstdio>
#include <string>

namespace metasymnet::detail {

// Shortest exact round-trip formatting for doubles in CSV/prefix output.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace metasymnet::detail
