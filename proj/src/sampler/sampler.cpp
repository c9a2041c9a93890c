#include "nsfsa/sampler/sampler.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace nsfsa {
namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

struct GlsFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd mean;
};

GlsFactor gls_factor(const DataCovOps& ops, const Eigen::VectorXd& z, const Eigen::MatrixXd& x) {
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd rhs(x.rows(), p + 1);
  rhs.leftCols(p) = x;
  rhs.col(p) = z;
  const Eigen::MatrixXd sol = ops.solve(rhs);
  const Eigen::MatrixXd xtx = x.transpose() * sol.leftCols(p);
  const Eigen::VectorXd xtz = x.transpose() * sol.col(p);
  GlsFactor out;
  out.llt.compute(0.5 * (xtx + xtx.transpose()));
  const Eigen::VectorXd piv = out.llt.matrixLLT().diagonal();
  if (out.llt.info() != Eigen::Success || !(piv.minCoeff() > 1e-7 * piv.maxCoeff())) {
    throw ConfigError("design matrix is rank-deficient (X' Sigma^-1 X is singular)");
  }
  out.mean = out.llt.solve(xtz);
  return out;
}

}  // namespace

void ModelData::validate() const {
  const Eigen::Index n = static_cast<Eigen::Index>(locs.size());
  if (n == 0) throw ConfigError("no observations");
  if (z.size() != n || x.rows() != n) throw ConfigError("data: locations, z and X have different lengths");
  if (x.cols() < 1) throw ConfigError("data: X needs at least one column");
  const Eigen::Index d = locs.front().size();
  if (d < 1 || d > kMaxDim) throw ConfigError("data: spatial dimension must be 1, 2 or 3");
  for (const auto& s : locs) {
    if (s.size() != d) throw ConfigError("data: locations have mixed dimensions");
    if (!s.allFinite()) throw ConfigError("data: non-finite coordinate");
  }
  if (!all_finite(z) || !all_finite(x)) throw ConfigError("data: non-finite value");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) throw ConfigError("design matrix X is rank-deficient");
}

ProposalDomain ProposalDomain::expanded_bbox(const LocationList& locs, double fraction) {
  if (locs.empty()) throw ConfigError("proposal domain: no locations");
  if (!(fraction >= 0.0)) throw ConfigError("proposal domain: expansion must be non-negative");
  ProposalDomain dom;
  dom.lo = locs.front();
  dom.hi = locs.front();
  for (const auto& s : locs) {
    dom.lo = dom.lo.cwiseMin(s);
    dom.hi = dom.hi.cwiseMax(s);
  }
  const Location pad = fraction * (dom.hi - dom.lo);
  dom.lo -= pad;
  dom.hi += pad;
  return dom;
}

bool ProposalDomain::contains(const Location& s) const {
  return s.size() == lo.size() && (s.array() >= lo.array()).all() && (s.array() <= hi.array()).all();
}

Location ProposalDomain::sample(Rng& rng) const {
  Location s(lo.size());
  for (Eigen::Index c = 0; c < lo.size(); ++c) s(c) = rng.uniform(lo(c), hi(c));
  return s;
}

void ChainConfig::validate() const {
  if (n_iter < 1 || n_burn < 0 || n_burn >= n_iter) throw ConfigError("need 0 <= n_burn < n_iter");
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (!(noise_var > 0.0)) throw ConfigError("noise_var must be supplied and positive");
  if (!(taper.length > 0.0)) throw ConfigError("taper length must be positive");
  if (check_every < 1) throw ConfigError("check_every must be at least 1");
  if (proposal_domain.lo.size() == 0 || proposal_domain.lo.size() != proposal_domain.hi.size() ||
      (proposal_domain.hi.array() < proposal_domain.lo.array()).any()) {
    throw ConfigError("proposal domain is empty or malformed");
  }
}

GlsMoments gls_moments(const DataCovOps& ops, const Eigen::VectorXd& z, const Eigen::MatrixXd& x) {
  GlsFactor f = gls_factor(ops, z, x);
  GlsMoments out;
  out.mean = f.mean;
  out.cov = f.llt.solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
  return out;
}

Eigen::VectorXd gibbs_beta(const DataCovOps& ops, const Eigen::VectorXd& z, const Eigen::MatrixXd& x, Rng& rng) {
  GlsFactor f = gls_factor(ops, z, x);
  const Eigen::VectorXd u = rng.normal_vector(x.cols());
  return f.mean + f.llt.matrixU().solve(u);
}

Eigen::VectorXd ols_beta(const Eigen::MatrixXd& x, const Eigen::VectorXd& z) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) throw ConfigError("design matrix X is rank-deficient");
  return qr.solve(z);
}

double mh_log_ratio(const ParentCovParams& current, double loglik_current, const ParentCovParams& proposed,
                    double loglik_proposed) {
  return (loglik_proposed + proposed.log_prior()) - (loglik_current + current.log_prior());
}

KnotProposal propose_knot_move(int r, const ProposalDomain& domain, Rng& rng) {
  KnotProposal p;
  if (r <= 0) {
    p.type = MoveType::add;
    p.location = domain.sample(rng);
    return p;
  }
  switch (rng.index(3)) {
    case 0:
      p.type = MoveType::add;
      p.location = domain.sample(rng);
      break;
    case 1:
      p.type = MoveType::remove;
      p.index = rng.index(r);
      break;
    default:
      p.type = MoveType::move;
      p.index = rng.index(r);
      p.location = domain.sample(rng);
      break;
  }
  return p;
}

double rj_log_proposal_ratio(int r_old, MoveType move) {
  switch (move) {
    case MoveType::add:
      // The reverse of the forced add from r = 0 is a delete chosen w.p. 1/3.
      return r_old == 0 ? std::log(1.0 / 3.0) : -std::log(r_old + 1.0);
    case MoveType::remove:
      if (r_old < 1) throw DomainError("cannot delete from an empty knot set");
      // From r = 1 the reverse is the forced add, so the 1/3 selection
      // probability only appears in the forward direction.
      return r_old == 1 ? std::log(3.0) : std::log(static_cast<double>(r_old));
    case MoveType::move:
    case MoveType::none:
      return 0.0;
  }
  return 0.0;
}

double rj_accept_prob(double loglik_new, double loglik_old, int r_old, MoveType move) {
  const double log_a = loglik_new - loglik_old + rj_log_proposal_ratio(r_old, move);
  if (std::isnan(log_a)) return 0.0;
  return log_a >= 0.0 ? 1.0 : std::exp(log_a);
}

RjSampler::RjSampler(const ModelData& data, const ParentCovParams& init_params, KnotSet init_knots,
                     const ChainConfig& config)
    : data_(data), config_(config), rng_(derive_seed(config.seed, 0)) {
  data_.validate();
  config_.validate();
  const int d = static_cast<int>(data_.locs.front().size());
  if (init_params.dim != d || config_.proposal_domain.dim() != d) {
    throw ConfigError("parameter, domain and data dimensions disagree");
  }
  for (const auto& k : init_knots.knots) {
    if (k.size() != d) throw ConfigError("knot dimension does not match the data");
  }
  state_.params = init_params;
  state_.knots = std::move(init_knots);
  state_.beta = ols_beta(data_.x, data_.z);
  proposal_ = AdaptiveProposal(init_params.prior_variances(), config_.mh_adapt);
  record_ = ChainRecord::with_layout(init_params, static_cast<int>(data_.x.cols()));
  if (!config_.prior_only) {
    geometry_ = FitGeometry::build(data_.locs, config_.taper, config_.noise_var, init_params.basis);
    state_.ops.emplace(geometry_, state_.params, state_.knots);
    state_.loglik = state_.ops->loglik(residual());
  }
}

Eigen::VectorXd RjSampler::residual() const { return data_.z - data_.x * state_.beta; }

double RjSampler::recompute_loglik() const {
  if (config_.prior_only) return 0.0;
  DataCovOps fresh(geometry_, state_.params, state_.knots);
  return fresh.loglik(residual());
}

void RjSampler::update_beta() {
  state_.beta = gibbs_beta(*state_.ops, data_.z, data_.x, rng_);
  state_.loglik = state_.ops->loglik(residual());
}

void RjSampler::update_theta() {
  last_theta_accepted_ = false;
  if (proposal_.dim() == 0) return;
  const Eigen::VectorXd current = state_.params.pack();
  const Eigen::VectorXd cand = proposal_.propose(current, rng_);
  ParentCovParams proposed = state_.params;
  proposed.unpack(cand);

  std::optional<DataCovOps> ops;
  double ll_new = 0.0;
  bool ok = true;
  if (!config_.prior_only) {
    try {
      ops.emplace(geometry_, proposed, state_.knots);
      ll_new = ops->loglik(residual());
      ok = std::isfinite(ll_new);
    } catch (const NumericalError&) {
      ok = false;
    } catch (const DomainError&) {
      ok = false;
    }
    if (!ok) ++stats_.failed_proposals;
  }
  if (ok) {
    const double log_a = mh_log_ratio(state_.params, state_.loglik, proposed, ll_new);
    ok = std::log(rng_.uniform()) < log_a;
  } else {
    rng_.uniform();  // keep the stream aligned regardless of failures
  }

  ++stats_.theta_proposals;
  if (iter_ > config_.n_burn) ++stats_.theta_post_burn_proposals;
  if (ok) {
    state_.params = std::move(proposed);
    if (ops) state_.ops = std::move(ops);
    state_.loglik = ll_new;
    ++stats_.theta_accepts;
    if (iter_ > config_.n_burn) ++stats_.theta_post_burn_accepts;
  }
  last_theta_accepted_ = ok;
  proposal_.update(state_.params.pack(), ok);
}

bool RjSampler::separated(const Location& k, int skip) const {
  const double eps = config_.min_knot_separation * config_.proposal_domain.diameter();
  for (int j = 0; j < state_.knots.size(); ++j) {
    if (j == skip) continue;
    if ((state_.knots.knots[j] - k).norm() <= eps) return false;
  }
  return true;
}

void RjSampler::update_knots() {
  const int r = state_.knots.size();
  const KnotProposal prop = propose_knot_move(r, config_.proposal_domain, rng_);
  last_move_ = prop.type;
  last_knot_accepted_ = false;
  ++stats_.knot_proposals;
  const double u = rng_.uniform();

  if (prop.type != MoveType::remove && !separated(prop.location, prop.type == MoveType::move ? prop.index : -1)) {
    ++stats_.separation_rejections;
    return;
  }

  KnotSet knots = state_.knots;
  switch (prop.type) {
    case MoveType::add:
      knots.knots.push_back(prop.location);
      break;
    case MoveType::remove:
      knots.knots.erase(knots.knots.begin() + prop.index);
      break;
    default:
      knots.knots[prop.index] = prop.location;
      break;
  }

  std::optional<DataCovOps> ops;
  double ll_new = 0.0;
  double ll_old = 0.0;
  if (!config_.prior_only) {
    ll_old = state_.loglik;
    try {
      ops = *state_.ops;
      switch (prop.type) {
        case MoveType::add:
          ops->add_knot(prop.location);
          break;
        case MoveType::remove:
          ops->delete_knot(prop.index);
          break;
        default:
          ops->move_knot(prop.index, prop.location);
          break;
      }
      ll_new = ops->loglik(residual());
    } catch (const NumericalError&) {
      ++stats_.failed_proposals;
      return;
    }
    if (!std::isfinite(ll_new)) {
      ++stats_.failed_proposals;
      return;
    }
  }

  if (u < rj_accept_prob(ll_new, ll_old, r, prop.type)) {
    state_.knots = std::move(knots);
    if (ops) state_.ops = std::move(ops);
    state_.loglik = ll_new;
    last_knot_accepted_ = true;
    ++stats_.knot_accepts;
  }
}

void RjSampler::audit() {
  const double fresh = recompute_loglik();
  const double err = std::abs(fresh - state_.loglik);
  stats_.max_audit_error = std::max(stats_.max_audit_error, err);
  if (!(err <= 1e-8 * std::max(1.0, std::abs(fresh)))) {
    throw NumericalError("cached log-likelihood drifted from recomputation (" + std::to_string(state_.loglik) +
                         " vs " + std::to_string(fresh) + ")");
  }
}

void RjSampler::step() {
  ++iter_;
  if (!config_.prior_only) update_beta();
  update_theta();
  if (config_.knot_mode == KnotMode::random) {
    update_knots();
  } else {
    last_move_ = MoveType::none;
    last_knot_accepted_ = false;
  }
  if (iter_ == config_.n_burn) proposal_.freeze();
  if (!config_.prior_only && iter_ % config_.check_every == 0) audit();
  if (iter_ > config_.n_burn && (iter_ - config_.n_burn) % config_.thin == 0) {
    ChainRow row;
    row.iter = iter_;
    row.beta = state_.beta;
    store_params(state_.params, row);
    row.loglik = state_.loglik;
    row.move = last_move_;
    row.accepted = last_knot_accepted_;
    row.theta_accepted = last_theta_accepted_;
    row.knots = state_.knots;
    record_.append(std::move(row));
  }
}

ChainRecord RjSampler::run() {
  if (config_.n_burn == 0) proposal_.freeze();
  while (iter_ < config_.n_iter) {
    try {
      step();
    } catch (const NumericalError& e) {
      throw NumericalError("chain aborted at iteration " + std::to_string(iter_) + ": " + e.what());
    }
  }
  return record_;
}

ChainRecord run_chain(const ModelData& data, const ParentCovParams& init_params, const KnotSet& init_knots,
                      const ChainConfig& config, ChainStats* stats) {
  RjSampler sampler(data, init_params, init_knots, config);
  ChainRecord rec = sampler.run();
  if (stats) *stats = sampler.stats();
  return rec;
}

}  // namespace nsfsa
