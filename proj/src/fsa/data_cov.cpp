#include "nsfsa/fsa/data_cov.hpp"

#include <cmath>
#include <numbers>

#include "nsfsa/fsa/neighbors.hpp"
#include "nsfsa/kernels/nonstationary.hpp"

namespace nsfsa {

std::shared_ptr<const FitGeometry> FitGeometry::build(LocationList locs, const TaperSpec& taper,
                                                      double noise_var, const SvBasis& basis) {
  if (!(noise_var >= 0.0)) throw ConfigError("noise variance must be non-negative");
  auto g = std::make_shared<FitGeometry>();
  g->locs = std::move(locs);
  g->taper = taper;
  g->noise_var = noise_var;
  g->pattern = std::make_shared<const SparsePattern>(g->size(), neighbor_pairs(g->locs, taper.length));
  const auto& pairs = g->pattern->pairs();
  g->pair_taper.resize(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    g->pair_taper[k] = taper((g->locs[pairs[k].i] - g->locs[pairs[k].j]).norm());
  }
  g->sv_basis = basis.evaluate(g->locs);
  return g;
}

DataCovOps::DataCovOps(std::shared_ptr<const FitGeometry> geometry, const ParentCovParams& params,
                       KnotSet knots)
    : geometry_(std::move(geometry)), params_(params), knots_(std::move(knots)), v_(geometry_->pattern) {
  refresh_params();
}

void DataCovOps::set_params(const ParentCovParams& params) {
  params_ = params;
  refresh_params();
}

Eigen::VectorXd DataCovOps::basis_column(const Location& k, const LocalCovParams& kp) const {
  const int n = size();
  Eigen::VectorXd col(n);
  for (int i = 0; i < n; ++i) {
    col(i) = local_[i].sigma * nonstat_matern(geometry_->locs[i], local_[i], k, kp);
  }
  return col;
}

void DataCovOps::refresh_params() {
  const FitGeometry& g = *geometry_;
  local_ = params_.local_all(g.sv_basis);
  const auto& pairs = g.pattern->pairs();
  pair_parent_.resize(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const int i = pairs[k].i;
    const int j = pairs[k].j;
    pair_parent_[k] = i == j ? local_[i].sigma * local_[i].sigma
                             : parent_cov(g.locs[i], local_[i], g.locs[j], local_[j]);
  }
  knot_local_.clear();
  for (const auto& k : knots_.knots) knot_local_.push_back(params_.local_at(k));
  basis_.resize(size(), rank());
  for (int j = 0; j < rank(); ++j) basis_.col(j) = basis_column(knots_.knots[j], knot_local_[j]);
  refresh_knots();
}

void DataCovOps::add_knot(const Location& k) {
  knots_.knots.push_back(k);
  knot_local_.push_back(params_.local_at(k));
  basis_.conservativeResize(Eigen::NoChange, rank());
  basis_.col(rank() - 1) = basis_column(k, knot_local_.back());
  refresh_knots();
}

void DataCovOps::delete_knot(int j) {
  if (j < 0 || j >= rank()) throw DomainError("delete_knot: index out of range");
  knots_.knots.erase(knots_.knots.begin() + j);
  knot_local_.erase(knot_local_.begin() + j);
  const int r = rank();
  if (j < r) basis_.middleCols(j, r - j) = basis_.rightCols(r - j).eval();
  basis_.conservativeResize(Eigen::NoChange, r);
  refresh_knots();
}

void DataCovOps::move_knot(int j, const Location& k) {
  if (j < 0 || j >= rank()) throw DomainError("move_knot: index out of range");
  knots_.knots[j] = k;
  knot_local_[j] = params_.local_at(k);
  basis_.col(j) = basis_column(k, knot_local_[j]);
  refresh_knots();
}

void DataCovOps::refresh_knots() {
  const FitGeometry& g = *geometry_;
  const int n = size();
  const int r = rank();
  precision_ = build_knot_precision(knots_, knot_local_);
  if (r > 0) {
    whitened_ = precision_.corr_chol.triangularView<Eigen::Lower>().solve(basis_.transpose()).transpose();
  } else {
    whitened_.resize(n, 0);
  }

  const auto& pairs = g.pattern->pairs();
  std::vector<double> c_nu(pairs.size(), 0.0);
  for (int c = 0; c < r; ++c) {
    const double* col = whitened_.col(c).data();
    for (std::size_t k = 0; k < pairs.size(); ++k) c_nu[k] += col[pairs[k].i] * col[pairs[k].j];
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    double v = g.pair_taper[k] * (pair_parent_[k] - c_nu[k]);
    if (pairs[k].i == pairs[k].j) v += g.noise_var;
    v_.set_pair_value(static_cast<int>(k), v);
  }
  v_.factorize();

  if (r > 0) {
    vinv_whitened_ = v_.solve(whitened_);
    Eigen::MatrixXd inner = whitened_.transpose() * vinv_whitened_;
    inner.diagonal().array() += 1.0;
    inner_.compute(inner);
    if (inner_.info() != Eigen::Success) throw NumericalError("SMW inner factorization failed");
  } else {
    vinv_whitened_.resize(n, 0);
  }
}

Eigen::MatrixXd DataCovOps::solve(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd y = v_.solve(rhs);
  if (rank() > 0) y -= vinv_whitened_ * inner_.solve(whitened_.transpose() * y);
  return y;
}

Eigen::VectorXd DataCovOps::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd y = v_.solve(rhs);
  if (rank() > 0) y -= vinv_whitened_ * inner_.solve(whitened_.transpose() * y);
  return y;
}

double DataCovOps::log_det() const {
  double ld = v_.log_det();
  if (rank() > 0) ld += 2.0 * inner_.matrixLLT().diagonal().array().log().sum();
  return ld;
}

double DataCovOps::loglik(const Eigen::VectorXd& resid) const {
  const double n = static_cast<double>(size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * log_det() - 0.5 * resid.dot(solve(resid));
}

Eigen::MatrixXd smw_solve(const DataCovOps& ops, const Eigen::MatrixXd& rhs) { return ops.solve(rhs); }
double logdet_sigma_z(const DataCovOps& ops) { return ops.log_det(); }
double gaussian_loglik(const DataCovOps& ops, const Eigen::VectorXd& resid) { return ops.loglik(resid); }

DataCovOps add_knot_update(const DataCovOps& ops, const Location& k) {
  DataCovOps out = ops;
  out.add_knot(k);
  return out;
}

DataCovOps delete_knot_update(const DataCovOps& ops, int j) {
  DataCovOps out = ops;
  out.delete_knot(j);
  return out;
}

SparseSymMatrix build_tapered_v(const LocationList& locs, const ParentCovParams& params,
                                const KnotSet& knots, const TaperSpec& taper, double noise_var) {
  auto geometry = FitGeometry::build(locs, taper, noise_var, params.basis);
  DataCovOps ops(geometry, params, knots);
  return ops.v();
}

DenseDataCov::DenseDataCov(const LocationList& locs, const ParentCovParams& params,
                           const KnotSet& knots, const TaperSpec& taper, double noise_var) {
  const int n = static_cast<int>(locs.size());
  const int r = knots.size();
  std::vector<LocalCovParams> lp;
  for (const auto& s : locs) lp.push_back(params.local_at(s));
  std::vector<LocalCovParams> kp;
  for (const auto& k : knots.knots) kp.push_back(params.local_at(k));

  Eigen::MatrixXd c_nu = Eigen::MatrixXd::Zero(n, n);
  if (r > 0) {
    Eigen::MatrixXd b(n, r);
    for (int i = 0; i < n; ++i) b.row(i) = build_basis_row(locs[i], lp[i], knots, kp).transpose();
    Eigen::MatrixXd rk(r, r);
    for (int a = 0; a < r; ++a)
      for (int c = 0; c < r; ++c) rk(a, c) = a == c ? 1.0 : nonstat_matern(knots.knots[a], kp[a], knots.knots[c], kp[c]);
    const KnotPrecision w = build_knot_precision(knots, kp);
    rk.diagonal().array() += w.jitter;
    c_nu = b * rk.llt().solve(b.transpose());
  }
  sigma_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double t = taper((locs[i] - locs[j]).norm());
      double v = c_nu(i, j);
      if (t > 0.0) v += t * (parent_cov(locs[i], lp[i], locs[j], lp[j]) - c_nu(i, j));
      if (i == j) v += noise_var;
      sigma_(i, j) = v;
      sigma_(j, i) = v;
    }
  }
  llt_.compute(sigma_);
  if (llt_.info() != Eigen::Success) throw NumericalError("dense Sigma_Z is not positive definite");
}

Eigen::MatrixXd DenseDataCov::solve(const Eigen::MatrixXd& rhs) const { return llt_.solve(rhs); }

double DenseDataCov::log_det() const { return 2.0 * llt_.matrixLLT().diagonal().array().log().sum(); }

double DenseDataCov::loglik(const Eigen::VectorXd& resid) const {
  const double n = static_cast<double>(sigma_.rows());
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * log_det() -
         0.5 * resid.dot(llt_.solve(resid));
}

}  // namespace nsfsa
