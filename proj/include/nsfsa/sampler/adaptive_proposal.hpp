#ifndef NSFSA_SAMPLER_ADAPTIVE_PROPOSAL_HPP
#define NSFSA_SAMPLER_ADAPTIVE_PROPOSAL_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "nsfsa/sampler/rng.hpp"

namespace nsfsa {

struct AdaptSettings {
  /// Iterations run with the fixed diagonal proposal before the empirical
  /// covariance takes over.
  int initial_iters = 200;
  /// Initial proposal sd as a fraction of the prior sd.
  double initial_scale = 0.1;
  double target_accept = 0.234;
  double regularization = 1e-8;
  /// Robbins-Monro tuning of a global log scale towards target_accept.
  bool tune_scale = true;
};

/// Haario-style adaptive random-walk proposal: covariance
/// lambda * 2.38^2/dim * (empirical covariance + eps I), with the global factor
/// lambda tuned towards the target acceptance rate. Adaptation stops once
/// freeze() is called.
class AdaptiveProposal {
 public:
  AdaptiveProposal() = default;
  AdaptiveProposal(const Eigen::VectorXd& initial_variances, const AdaptSettings& settings);

  Eigen::VectorXd propose(const Eigen::VectorXd& current, Rng& rng);
  /// Record the state after an MH step and whether the proposal was accepted.
  void update(const Eigen::VectorXd& state, bool accepted);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  int dim() const { return static_cast<int>(initial_var_.size()); }
  double log_scale() const { return log_scale_; }
  Eigen::MatrixXd covariance() const;

 private:
  AdaptSettings settings_;
  Eigen::VectorXd initial_var_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd scatter_;
  long count_ = 0;
  long steps_ = 0;
  double log_scale_ = 0.0;
  bool frozen_ = false;
  bool dirty_ = true;
  Eigen::MatrixXd chol_;
};

}  // namespace nsfsa

#endif  // NSFSA_SAMPLER_ADAPTIVE_PROPOSAL_HPP
