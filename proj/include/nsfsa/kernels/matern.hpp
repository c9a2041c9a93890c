#ifndef NSFSA_KERNELS_MATERN_HPP
#define NSFSA_KERNELS_MATERN_HPP

namespace nsfsa {

/// Lower clamp applied to the smoothness passed to the Matern correlation.
constexpr double kMinSmoothness = 1e-3;

/// Matern correlation with smoothness `smooth`, parameterised so that
/// M(h) = (2 h sqrt(v))^v K_v(2 h sqrt(v)) 2^(1-v) / Gamma(v) and M(0) = 1.
double matern_corr(double h, double smooth);

/// Standard normal cumulative distribution function.
double normal_cdf(double x);

}  // namespace nsfsa

#endif  // NSFSA_KERNELS_MATERN_HPP
