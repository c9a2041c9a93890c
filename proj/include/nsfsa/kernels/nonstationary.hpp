#ifndef NSFSA_KERNELS_NONSTATIONARY_HPP
#define NSFSA_KERNELS_NONSTATIONARY_HPP

#include "nsfsa/common.hpp"
#include "nsfsa/kernels/sv_params.hpp"

namespace nsfsa {

/// Mahalanobis-like distance {2 h' (A1 + A2)^{-1} h}^{1/2}, h = s1 - s2.
double sv_distance(const Location& s1, const Location& s2, const SmallMatrix& a1,
                   const SmallMatrix& a2);

/// Nonstationary Matern correlation c(s1,s2) M_{(v1+v2)/2}(q(s1,s2)) from
/// parameters already evaluated at both locations.
double nonstat_matern(const Location& s1, const LocalCovParams& p1, const Location& s2,
                      const LocalCovParams& p2);

/// sigma(s1) sigma(s2) times the nonstationary Matern correlation.
double parent_cov(const Location& s1, const LocalCovParams& p1, const Location& s2,
                  const LocalCovParams& p2);

double nonstat_matern(const Location& s1, const Location& s2, const ParentCovParams& params);
double parent_cov(const Location& s1, const Location& s2, const ParentCovParams& params);

}  // namespace nsfsa

#endif  // NSFSA_KERNELS_NONSTATIONARY_HPP
