#include "nsfsa/sampler/adaptive_proposal.hpp"

#include <cmath>

namespace nsfsa {

AdaptiveProposal::AdaptiveProposal(const Eigen::VectorXd& initial_variances, const AdaptSettings& settings)
    : settings_(settings),
      initial_var_(initial_variances),
      mean_(Eigen::VectorXd::Zero(initial_variances.size())),
      scatter_(Eigen::MatrixXd::Zero(initial_variances.size(), initial_variances.size())) {}

Eigen::MatrixXd AdaptiveProposal::covariance() const {
  const int d = dim();
  Eigen::MatrixXd cov;
  if (count_ < settings_.initial_iters || count_ < 2) {
    cov = (settings_.initial_scale * settings_.initial_scale * initial_var_).asDiagonal();
  } else {
    cov = scatter_ / static_cast<double>(count_ - 1);
    cov.diagonal().array() += settings_.regularization;
    cov *= 2.38 * 2.38 / d;
  }
  return std::exp(log_scale_) * cov;
}

Eigen::VectorXd AdaptiveProposal::propose(const Eigen::VectorXd& current, Rng& rng) {
  if (dim() == 0) return current;
  if (dirty_) {
    Eigen::MatrixXd cov = covariance();
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      cov.diagonal().array() += 1e-6 * cov.diagonal().mean();
      llt.compute(cov);
    }
    chol_ = llt.matrixL();
    dirty_ = false;
  }
  return current + chol_ * rng.normal_vector(dim());
}

void AdaptiveProposal::update(const Eigen::VectorXd& state, bool accepted) {
  if (frozen_ || dim() == 0) return;
  ++count_;
  const Eigen::VectorXd delta = state - mean_;
  mean_ += delta / static_cast<double>(count_);
  scatter_ += delta * (state - mean_).transpose();
  ++steps_;
  if (settings_.tune_scale) {
    const double gain = 1.0 / std::pow(static_cast<double>(steps_) + 1.0, 0.6);
    log_scale_ += gain * ((accepted ? 1.0 : 0.0) - settings_.target_accept);
  }
  dirty_ = true;
}

}  // namespace nsfsa
