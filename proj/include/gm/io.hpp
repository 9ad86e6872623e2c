#pragma once

#include <cstdio>
#include <string>

namespace gm {

/// 17 significant digits: round-trips every double.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace gm
