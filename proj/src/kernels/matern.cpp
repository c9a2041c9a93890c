#include "nsfsa/kernels/matern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsfsa/common.hpp"
#include "nsfsa/kernels/bessel.hpp"

namespace nsfsa {

double matern_corr(double h, double smooth) {
  if (!(h >= 0.0)) throw DomainError("matern_corr: lag must be non-negative");
  if (h == 0.0) return 1.0;
  const double v = std::max(smooth, kMinSmoothness);
  const double z = 2.0 * h * std::sqrt(v);
  // Work on the log scale with the exponentially scaled Bessel function so
  // that large lags underflow gracefully to zero.
  const double log_m = v * std::log(z) - z + std::log(bessel_k_scaled(v, z)) +
                       (1.0 - v) * std::numbers::ln2 - std::lgamma(v);
  return std::min(1.0, std::exp(log_m));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace nsfsa
