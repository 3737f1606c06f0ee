#pragma once

#include <cstdio>
#include <string>

namespace loopmaps::text {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace loopmaps::text
