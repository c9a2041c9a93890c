#ifndef NSFSA_FSA_KNOTS_HPP
#define NSFSA_FSA_KNOTS_HPP

#include <vector>

#include <Eigen/Core>

#include "nsfsa/common.hpp"
#include "nsfsa/kernels/sv_params.hpp"
#include "nsfsa/kernels/taper.hpp"

namespace nsfsa {

/// Ordered knot locations of the low-rank component; may be empty.
struct KnotSet {
  LocationList knots;

  int size() const { return static_cast<int>(knots.size()); }
  bool empty() const { return knots.empty(); }
};

/// Knot precision W = R_K^{-1}, held as the lower Cholesky factor of the knot
/// correlation matrix R_K. `jitter` is the diagonal inflation that was needed.
struct KnotPrecision {
  Eigen::MatrixXd corr_chol;
  double jitter = 0.0;

  int size() const { return static_cast<int>(corr_chol.rows()); }
};

/// Factor R_K = (rho(k_i, k_j)); escalates jitter 1e-10, 1e-8, 1e-6 on failure.
KnotPrecision build_knot_precision(const KnotSet& knots, const std::vector<LocalCovParams>& knot_params);

/// Basis row b(s) = sigma(s) (rho(s, k_1), ..., rho(s, k_r)).
Eigen::VectorXd build_basis_row(const Location& s, const LocalCovParams& at_s, const KnotSet& knots,
                                const std::vector<LocalCovParams>& knot_params);

/// Predictive-process covariance C_nu(s1, s2) = b(s1)' W b(s2).
double predictive_cov(const Location& s1, const Location& s2, const ParentCovParams& params,
                      const KnotSet& knots);

/// Full-scale covariance C_nu + T(|h|/L) (C_P - C_nu) of the true process.
double implied_cov_y(const Location& s1, const Location& s2, const ParentCovParams& params,
                     const KnotSet& knots, const TaperSpec& taper);

}  // namespace nsfsa

#endif  // NSFSA_FSA_KNOTS_HPP
