#include "nsfsa/predictor/predictor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <istream>
#include <ostream>
#include <thread>

#include "nsfsa/fsa/neighbors.hpp"
#include "nsfsa/kernels/nonstationary.hpp"

namespace nsfsa {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((v >> (8 * b)) & 0xffULL) << (8 * (7 - b));
    return out;
  }
  return v;
}

}  // namespace

PredictionSet PredictionSet::build(LocationList locations, Eigen::MatrixXd x, const LocationList& observed,
                                   double tol) {
  if (x.rows() != static_cast<Eigen::Index>(locations.size())) {
    throw ConfigError("prediction covariates and locations have different lengths");
  }
  PredictionSet ps;
  ps.locations = std::move(locations);
  ps.x = std::move(x);
  ps.overlap.assign(ps.locations.size(), -1);
  // Observed indices sorted by first coordinate; candidates are found by bisection.
  std::vector<int> order(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return observed[a](0) < observed[b](0); });
  for (std::size_t p = 0; p < ps.locations.size(); ++p) {
    const Location& s = ps.locations[p];
    auto it = std::lower_bound(order.begin(), order.end(), s(0) - tol,
                               [&](int idx, double v) { return observed[idx](0) < v; });
    for (; it != order.end() && observed[*it](0) <= s(0) + tol; ++it) {
      if (observed[*it].size() == s.size() && (observed[*it] - s).cwiseAbs().maxCoeff() <= tol) {
        ps.overlap[p] = *it;
        break;
      }
    }
  }
  return ps;
}

EtaMoments eta_moments(const DataCovOps& ops, const Eigen::VectorXd& resid) {
  EtaMoments out;
  const int r = ops.rank();
  if (r == 0) return out;
  const auto& inner = ops.inner_factor();
  const Eigen::VectorXd xi = inner.solve(ops.vinv_whitened().transpose() * resid);
  const auto lkt = ops.precision().corr_chol.transpose().triangularView<Eigen::Upper>();
  out.mean = lkt.solve(xi);
  const Eigen::MatrixXd pinv = inner.solve(Eigen::MatrixXd::Identity(r, r));
  const Eigen::MatrixXd half = lkt.solve(pinv);
  out.cov = lkt.solve(half.transpose()).transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

Eigen::VectorXd sample_eta(const DataCovOps& ops, const Eigen::VectorXd& resid, Rng& rng) {
  const int r = ops.rank();
  if (r == 0) return Eigen::VectorXd(0);
  const auto& inner = ops.inner_factor();
  Eigen::VectorXd xi = inner.solve(ops.vinv_whitened().transpose() * resid);
  xi += inner.matrixU().solve(rng.normal_vector(r));
  return ops.precision().corr_chol.transpose().triangularView<Eigen::Upper>().solve(xi);
}

Eigen::MatrixXd basis_at(const DataCovOps& ops, const LocationList& locs) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(locs.size()), ops.rank());
  if (ops.rank() == 0) return out;
  for (std::size_t i = 0; i < locs.size(); ++i) {
    const LocalCovParams lp = ops.params().local_at(locs[i]);
    out.row(static_cast<Eigen::Index>(i)) = build_basis_row(locs[i], lp, ops.knots(), ops.knot_params()).transpose();
  }
  return out;
}

DeltaSimulator::DeltaSimulator(std::shared_ptr<const FitGeometry> geometry, const PredictionSet& pset)
    : geometry_(std::move(geometry)) {
  joint_locs_ = geometry_->locs;
  joint_index_.resize(pset.locations.size());
  for (std::size_t p = 0; p < pset.locations.size(); ++p) {
    if (pset.overlap[p] >= 0) {
      joint_index_[p] = pset.overlap[p];
    } else {
      joint_index_[p] = static_cast<int>(joint_locs_.size());
      joint_locs_.push_back(pset.locations[p]);
    }
  }
  const int nj = static_cast<int>(joint_locs_.size());
  pattern_ = std::make_shared<const SparsePattern>(nj, neighbor_pairs(joint_locs_, geometry_->taper.length));
  const auto& pairs = pattern_->pairs();
  pair_taper_.resize(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    pair_taper_[k] = geometry_->taper((joint_locs_[pairs[k].i] - joint_locs_[pairs[k].j]).norm());
  }
}

SparseSymMatrix DeltaSimulator::joint_cov(const DataCovOps& ops) const {
  const int n = geometry_->size();
  const int nj = static_cast<int>(joint_locs_.size());
  const int r = ops.rank();
  std::vector<LocalCovParams> local(ops.local_params());
  local.reserve(nj);
  Eigen::MatrixXd bw(nj, r);
  if (r > 0) bw.topRows(n) = ops.whitened_basis();
  if (nj > n) {
    LocationList fresh(joint_locs_.begin() + n, joint_locs_.end());
    for (const auto& s : fresh) local.push_back(ops.params().local_at(s));
    if (r > 0) {
      const Eigen::MatrixXd b_new = basis_at(ops, fresh);
      bw.bottomRows(nj - n) =
          ops.precision().corr_chol.triangularView<Eigen::Lower>().solve(b_new.transpose()).transpose();
    }
  }
  SparseSymMatrix v(pattern_);
  const auto& pairs = pattern_->pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const int a = pairs[k].i;
    const int b = pairs[k].j;
    double c = a == b ? local[a].sigma * local[a].sigma
                      : parent_cov(joint_locs_[a], local[a], joint_locs_[b], local[b]);
    if (r > 0) c -= bw.row(a).dot(bw.row(b));
    v.set_pair_value(static_cast<int>(k), pair_taper_[k] * c);
  }
  return v;
}

Eigen::VectorXd DeltaSimulator::draw(const DataCovOps& ops, const Eigen::VectorXd& eta, const Eigen::VectorXd& resid,
                                     Rng& rng) const {
  const int n = geometry_->size();
  const int nj = static_cast<int>(joint_locs_.size());
  SparseSymMatrix vj = joint_cov(ops);
  vj.factorize();
  const Eigen::VectorXd d_check = vj.factor_times(rng.normal_vector(nj));
  const Eigen::VectorXd e_check = std::sqrt(geometry_->noise_var) * rng.normal_vector(n);
  Eigen::VectorXd w = resid - d_check.head(n) - e_check;
  if (ops.rank() > 0) w -= ops.basis() * eta;
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(nj);
  padded.head(n) = ops.v().solve(w);
  const Eigen::VectorXd corr = vj.multiply(padded);
  Eigen::VectorXd out(static_cast<Eigen::Index>(joint_index_.size()));
  for (std::size_t p = 0; p < joint_index_.size(); ++p) {
    const int j = joint_index_[p];
    out(static_cast<Eigen::Index>(p)) = d_check(j) + corr(j);
  }
  return out;
}

Eigen::VectorXd conditional_sim_delta(const DataCovOps& ops, const Eigen::VectorXd& eta,
                                      const Eigen::VectorXd& resid, const PredictionSet& pset, Rng& rng) {
  DeltaSimulator sim(ops.geometry_ptr(), pset);
  return sim.draw(ops, eta, resid, rng);
}

double quantile_sorted(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

PosteriorField summarize_draws(const LocationList& locs, const Eigen::MatrixXd& draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must lie in (0, 1)");
  if (draws.cols() < 1) throw ConfigError("no posterior draws to summarize");
  PosteriorField f;
  f.locations = locs;
  f.level = level;
  const Eigen::Index np = draws.rows();
  const Eigen::Index m = draws.cols();
  f.mean.resize(np);
  f.sd.resize(np);
  f.lower.resize(np);
  f.upper.resize(np);
  const double tail = 0.5 * (1.0 - level);
  std::vector<double> row(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < np; ++i) {
    double mean = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) mean += draws(i, j);
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double dv = draws(i, j) - mean;
      ss += dv * dv;
      row[static_cast<std::size_t>(j)] = draws(i, j);
    }
    std::sort(row.begin(), row.end());
    f.mean(i) = mean;
    f.sd(i) = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1)) : 0.0;
    f.lower(i) = quantile_sorted(row, tail);
    f.upper(i) = quantile_sorted(row, 1.0 - tail);
  }
  return f;
}

void PosteriorField::write_csv(std::ostream& out) const {
  const int d = locations.empty() ? 1 : static_cast<int>(locations.front().size());
  for (int c = 1; c <= d; ++c) out << 's' << c << ',';
  out << "mean,sd,lower,upper\n";
  for (int i = 0; i < size(); ++i) {
    for (int c = 0; c < d; ++c) out << fmt(locations[i](c)) << ',';
    out << fmt(mean(i)) << ',' << fmt(sd(i)) << ',' << fmt(lower(i)) << ',' << fmt(upper(i)) << '\n';
  }
}

PosteriorField predict_field(const ChainRecord& chain, const ModelData& data, const PredictionSet& pset,
                             const ParentCovParams& tmpl, const TaperSpec& taper, double noise_var,
                             const PredictOptions& options) {
  if (chain.empty()) throw ConfigError("chain has no kept draws");
  if (options.keep_every < 1) throw ConfigError("keep_every must be at least 1");
  if (pset.x.cols() != data.x.cols()) throw ConfigError("prediction covariates do not match the fitted design");
  data.validate();

  std::vector<std::size_t> used;
  for (std::size_t k = 0; k < chain.rows.size(); k += static_cast<std::size_t>(options.keep_every)) used.push_back(k);
  const int m = static_cast<int>(used.size());

  auto geometry = FitGeometry::build(data.locs, taper, noise_var, tmpl.basis);
  const DeltaSimulator sim(geometry, pset);
  Eigen::MatrixXd draws(pset.size(), m);

  auto one_draw = [&](int j) {
    const ChainRow& row = chain.rows[used[j]];
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(j)));
    const ParentCovParams params = params_from_row(tmpl, row);
    const DataCovOps ops(geometry, params, row.knots);
    const Eigen::VectorXd resid = data.z - data.x * row.beta;
    const Eigen::VectorXd eta = sample_eta(ops, resid, rng);
    Eigen::VectorXd y = pset.x * row.beta + sim.draw(ops, eta, resid, rng);
    if (ops.rank() > 0) y += basis_at(ops, pset.locations) * eta;
    if (options.add_noise) y += std::sqrt(noise_var) * rng.normal_vector(y.size());
    draws.col(j) = y;
  };

  const int threads = std::max(1, std::min(options.threads, m));
  if (threads == 1) {
    for (int j = 0; j < m; ++j) one_draw(j);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int j = t; j < m; j += threads) one_draw(j);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  PosteriorField field = summarize_draws(pset.locations, draws, options.level);
  if (options.keep_draws) field.draws = std::move(draws);
  return field;
}

void write_draws_binary(const Eigen::MatrixXd& draws, std::ostream& out) {
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    for (Eigen::Index j = 0; j < draws.cols(); ++j) {
      const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(draws(i, j)));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
}

Eigen::MatrixXd read_draws_binary(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::uint64_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw ConfigError("draws file is truncated");
      out(i, j) = std::bit_cast<double>(to_little_endian(bits));
    }
  }
  return out;
}

}  // namespace nsfsa
