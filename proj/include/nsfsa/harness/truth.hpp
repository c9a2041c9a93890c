#ifndef NSFSA_HARNESS_TRUTH_HPP
#define NSFSA_HARNESS_TRUTH_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "nsfsa/common.hpp"

namespace nsfsa {

/// Deterministic sine-product truth of the first study.
double sim1_truth(double s);

/// Local standard deviation, squared range and smoothness of a 1-D truth.
struct SvTruth {
  double sigma = 1.0;
  double gamma = 1.0;
  double smooth = 1.0;
};

SvTruth sim2_params(double s);
SvTruth sim3_params(double s);

/// Dense parent covariance matrix of a 1-D nonstationary Matern truth.
Eigen::MatrixXd truth_covariance(const LocationList& locs, const std::vector<SvTruth>& params);

/// Constant trend `trend` plus a Gaussian process draw, via a dense Cholesky
/// factor (with small jitter escalation when needed).
Eigen::VectorXd gen_gp_truth(const LocationList& locs, const std::vector<SvTruth>& params, std::uint64_t seed,
                             double trend = 1.0);

/// Z = Y + iid N(0, noise_var).
Eigen::VectorXd simulate_data(const Eigen::VectorXd& y, double noise_var, std::uint64_t seed);

double empirical_variance(const Eigen::VectorXd& v);

}  // namespace nsfsa

#endif  // NSFSA_HARNESS_TRUTH_HPP
