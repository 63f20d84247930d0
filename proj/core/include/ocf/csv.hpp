#pragma once

#include <cstdio>
#include <string>

namespace ocf {

/// CSV cell text with 12 significant digits; byte-stable for a given value.
inline std::string FormatNumber(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace ocf
