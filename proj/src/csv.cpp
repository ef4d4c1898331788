#include "ltcm/csv.hpp"

#include <cmath>
#include <cstdio>

namespace ltcm {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

}  // namespace ltcm
