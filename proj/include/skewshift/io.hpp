#pragma once
// Text output helpers shared by the CLI and tests. CSV cells use '.' as the
// decimal separator and 17 significant digits; integral values keep one
// trailing decimal so columns stay recognizably floating-point.

#include <cstdio>
#include <ostream>
#include <string>

#include "skewshift/weyl.hpp"

namespace skewshift {

inline std::string fmt17(double v) {
  char buf[64];
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1.0e15) {
    std::snprintf(buf, sizeof buf, "%.1f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

inline void write_csv(const PathPolyline& path, std::ostream& os) {
  os << "t,re,im\n";
  for (std::size_t i = 0; i < path.t.size(); ++i)
    os << fmt17(path.t[i]) << ',' << fmt17(path.pos[i].real()) << ','
       << fmt17(path.pos[i].imag()) << '\n';
}

}  // namespace skewshift
