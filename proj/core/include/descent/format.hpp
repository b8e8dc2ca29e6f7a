#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>

namespace descent {

/// Shortest round-trip independent rendering: always 17 significant digits.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_header_lines(std::ostream& os, std::span<const std::string> header) {
  for (const auto& line : header) os << "# " << line << '\n';
}

}  // namespace descent
