#include "nsfsa/harness/truth.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "nsfsa/kernels/matern.hpp"
#include "nsfsa/kernels/nonstationary.hpp"
#include "nsfsa/kernels/sv_params.hpp"
#include "nsfsa/sampler/rng.hpp"

namespace nsfsa {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

LocalCovParams to_local(const SvTruth& t) {
  LocalCovParams lp;
  lp.sigma = t.sigma;
  lp.smooth = t.smooth;
  lp.aniso = SmallMatrix::Constant(1, 1, t.gamma);
  lp.log_det_aniso = std::log(t.gamma);
  return lp;
}

}  // namespace

double sim1_truth(double s) {
  const double a = (s - 306.0) / 512.0;
  const double b = (s - 50.0) / 512.0;
  return 1.0 + std::sin(kTwoPi * a * a) * std::sin(10.0 * kTwoPi * b * b);
}

SvTruth sim2_params(double s) {
  SvTruth t;
  t.sigma = 3.0 * std::exp(std::sin((1.0 - std::abs(s / 256.0 - 1.0)) * kTwoPi) / 2.0);
  t.gamma = 600.0 * std::exp(-2.0 * std::sin(s * kTwoPi / 256.0)) * (s / 256.0);
  t.smooth = 3.0 * normal_cdf(-std::sin(s * kTwoPi / 256.0));
  return t;
}

SvTruth sim3_params(double) { return SvTruth{3.0, 600.0, 1.0}; }

Eigen::MatrixXd truth_covariance(const LocationList& locs, const std::vector<SvTruth>& params) {
  if (params.size() != locs.size()) throw DomainError("truth_covariance: size mismatch");
  const int n = static_cast<int>(locs.size());
  std::vector<LocalCovParams> lp;
  lp.reserve(params.size());
  for (const auto& t : params) lp.push_back(to_local(t));
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i) {
    c(i, i) = lp[i].sigma * lp[i].sigma;
    for (int j = 0; j < i; ++j) {
      c(i, j) = parent_cov(locs[i], lp[i], locs[j], lp[j]);
      c(j, i) = c(i, j);
    }
  }
  return c;
}

Eigen::VectorXd gen_gp_truth(const LocationList& locs, const std::vector<SvTruth>& params, std::uint64_t seed,
                             double trend) {
  Eigen::MatrixXd c = truth_covariance(locs, params);
  const double mean_diag = c.diagonal().mean();
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  for (double rel : {1e-10, 1e-8, 1e-6}) {
    if (llt.info() == Eigen::Success) break;
    Eigen::MatrixXd cj = c;
    cj.diagonal().array() += rel * mean_diag;
    llt.compute(cj);
  }
  if (llt.info() != Eigen::Success) throw NumericalError("truth covariance is not positive definite after jitter");
  Rng rng(seed);
  const Eigen::VectorXd z = rng.normal_vector(static_cast<Eigen::Index>(locs.size()));
  return Eigen::VectorXd::Constant(z.size(), trend) + llt.matrixL() * z;
}

Eigen::VectorXd simulate_data(const Eigen::VectorXd& y, double noise_var, std::uint64_t seed) {
  if (!(noise_var >= 0.0)) throw ConfigError("noise variance must be non-negative");
  Rng rng(seed);
  return y + std::sqrt(noise_var) * rng.normal_vector(y.size());
}

double empirical_variance(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

}  // namespace nsfsa
