#pragma once

#include <iosfwd>
#include <string>

namespace ltcm {

/// 17 significant digits in scientific notation ("%.16e"); "nan"/"inf" spelled out.
std::string format_double(double value);

}  // namespace ltcm
