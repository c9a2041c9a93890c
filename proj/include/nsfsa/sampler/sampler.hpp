#ifndef NSFSA_SAMPLER_SAMPLER_HPP
#define NSFSA_SAMPLER_SAMPLER_HPP

#include <cstdint>
#include <memory>
#include <optional>

#include <Eigen/Core>

#include "nsfsa/common.hpp"
#include "nsfsa/fsa/data_cov.hpp"
#include "nsfsa/fsa/knots.hpp"
#include "nsfsa/kernels/sv_params.hpp"
#include "nsfsa/kernels/taper.hpp"
#include "nsfsa/sampler/adaptive_proposal.hpp"
#include "nsfsa/sampler/chain_record.hpp"
#include "nsfsa/sampler/rng.hpp"

namespace nsfsa {

/// Observations with their design matrix.
struct ModelData {
  LocationList locs;
  Eigen::VectorXd z;
  Eigen::MatrixXd x;

  int size() const { return static_cast<int>(locs.size()); }
  void validate() const;
};

/// Axis-aligned box from which new knots are drawn uniformly.
struct ProposalDomain {
  Location lo;
  Location hi;

  /// Bounding box of `locs` widened by `fraction` of its extent on every side.
  static ProposalDomain expanded_bbox(const LocationList& locs, double fraction);
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Location& s) const;
  double diameter() const { return (hi - lo).norm(); }
  Location sample(Rng& rng) const;
};

enum class KnotMode { random, fixed };

struct ChainConfig {
  long n_iter = 10000;
  long n_burn = 5000;
  long thin = 10;
  std::uint64_t seed = 1;
  ProposalDomain proposal_domain;
  AdaptSettings mh_adapt;
  double noise_var = 0.0;
  TaperSpec taper;
  KnotMode knot_mode = KnotMode::random;
  /// Cache audit period.
  long check_every = 100;
  /// Knot proposals closer than this fraction of the domain diameter to an
  /// existing knot are rejected.
  double min_knot_separation = 1e-6;
  /// Test mode: the likelihood is dropped from every acceptance ratio and beta
  /// is held fixed, so the chain targets the prior.
  bool prior_only = false;

  void validate() const;
};

struct ModelState {
  Eigen::VectorXd beta;
  ParentCovParams params;
  KnotSet knots;
  std::optional<DataCovOps> ops;
  double loglik = 0.0;
};

struct KnotProposal {
  MoveType type = MoveType::add;
  int index = -1;  // knot removed or moved
  Location location;  // knot added or new position
};

struct ChainStats {
  long theta_proposals = 0;
  long theta_accepts = 0;
  long theta_post_burn_proposals = 0;
  long theta_post_burn_accepts = 0;
  long knot_proposals = 0;
  long knot_accepts = 0;
  /// Proposals whose covariance could not be factored; counted as rejections.
  long failed_proposals = 0;
  long separation_rejections = 0;
  double max_audit_error = 0.0;

  double theta_accept_rate() const {
    return theta_post_burn_proposals > 0 ? static_cast<double>(theta_post_burn_accepts) / theta_post_burn_proposals : 0.0;
  }
  double knot_accept_rate() const {
    return knot_proposals > 0 ? static_cast<double>(knot_accepts) / knot_proposals : 0.0;
  }
};

struct GlsMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// GLS posterior of beta under a flat prior.
GlsMoments gls_moments(const DataCovOps& ops, const Eigen::VectorXd& z, const Eigen::MatrixXd& x);
Eigen::VectorXd gibbs_beta(const DataCovOps& ops, const Eigen::VectorXd& z, const Eigen::MatrixXd& x, Rng& rng);

/// Log of the untruncated MH ratio for a parameter proposal.
double mh_log_ratio(const ParentCovParams& current, double loglik_current, const ParentCovParams& proposed,
                    double loglik_proposed);

KnotProposal propose_knot_move(int r, const ProposalDomain& domain, Rng& rng);

/// log Q-ratio of a dimension move proposed from r_old knots.
double rj_log_proposal_ratio(int r_old, MoveType move);
double rj_accept_prob(double loglik_new, double loglik_old, int r_old, MoveType move);

/// Single-threaded RJ-MCMC chain: per iteration beta (Gibbs), theta (adaptive
/// block MH), then one knot birth/death/move.
class RjSampler {
 public:
  RjSampler(const ModelData& data, const ParentCovParams& init_params, KnotSet init_knots,
            const ChainConfig& config);

  /// Run the remaining iterations, returning the kept draws.
  ChainRecord run();
  void step();

  long iteration() const { return iter_; }
  const ModelState& state() const { return state_; }
  const ChainStats& stats() const { return stats_; }
  const ChainRecord& record() const { return record_; }
  /// From-scratch log-likelihood of the current state.
  double recompute_loglik() const;

 private:
  Eigen::VectorXd residual() const;
  void update_beta();
  void update_theta();
  void update_knots();
  bool separated(const Location& k, int skip) const;
  void audit();

  ModelData data_;
  ChainConfig config_;
  std::shared_ptr<const FitGeometry> geometry_;
  ModelState state_;
  Rng rng_;
  AdaptiveProposal proposal_;
  ChainStats stats_;
  ChainRecord record_;
  long iter_ = 0;
  MoveType last_move_ = MoveType::none;
  bool last_knot_accepted_ = false;
  bool last_theta_accepted_ = false;
};

/// OLS coefficients; throws ConfigError when X is rank-deficient.
Eigen::VectorXd ols_beta(const Eigen::MatrixXd& x, const Eigen::VectorXd& z);

ChainRecord run_chain(const ModelData& data, const ParentCovParams& init_params, const KnotSet& init_knots,
                      const ChainConfig& config, ChainStats* stats = nullptr);

}  // namespace nsfsa

#endif  // NSFSA_SAMPLER_SAMPLER_HPP
