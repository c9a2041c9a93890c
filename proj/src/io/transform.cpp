#include "nsfsa/io/transform.hpp"

#include <cmath>
#include <string>

#include "nsfsa/common.hpp"

namespace nsfsa {

double shift_log_transform(double tc, double shift) {
  const double v = tc + shift;
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError("shifted log transform needs value + shift > 0 (value " + std::to_string(tc) + ", shift " +
                      std::to_string(shift) + ")");
  }
  return std::log(v);
}

double inverse_shift_log(double y, double shift) { return std::exp(y) - shift; }

}  // namespace nsfsa
