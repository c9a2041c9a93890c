#ifndef NSFSA_FSA_DATA_COV_HPP
#define NSFSA_FSA_DATA_COV_HPP

#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "nsfsa/common.hpp"
#include "nsfsa/fsa/knots.hpp"
#include "nsfsa/fsa/sparse_sym.hpp"
#include "nsfsa/kernels/sv_params.hpp"
#include "nsfsa/kernels/taper.hpp"

namespace nsfsa {

/// Everything about the observed locations that stays fixed during a fit:
/// the taper pattern with its ordering, taper weights per pattern pair and
/// the SV-parameter basis evaluated at every location.
struct FitGeometry {
  LocationList locs;
  TaperSpec taper;
  double noise_var = 0.0;
  std::shared_ptr<const SparsePattern> pattern;
  std::vector<double> pair_taper;
  Eigen::MatrixXd sv_basis;

  int size() const { return static_cast<int>(locs.size()); }

  static std::shared_ptr<const FitGeometry> build(LocationList locs, const TaperSpec& taper,
                                                  double noise_var, const SvBasis& basis);
};

/// Operators for Sigma_Z = B W B' + V with V = V_delta + noise_var I sparse.
///
/// Internally the low-rank part is whitened, B W B' = Bw Bw' with
/// Bw = B L_K^{-T}, so Sherman-Morrison-Woodbury only factors the r x r matrix
/// I + Bw' V^{-1} Bw. Sigma_Z is never formed.
class DataCovOps {
 public:
  DataCovOps(std::shared_ptr<const FitGeometry> geometry, const ParentCovParams& params,
             KnotSet knots);

  /// Recompute everything that depends on the covariance parameters.
  void set_params(const ParentCovParams& params);
  void add_knot(const Location& k);
  void delete_knot(int j);
  void move_knot(int j, const Location& k);

  int size() const { return geometry_->size(); }
  int rank() const { return knots_.size(); }
  const FitGeometry& geometry() const { return *geometry_; }
  const std::shared_ptr<const FitGeometry>& geometry_ptr() const { return geometry_; }
  const ParentCovParams& params() const { return params_; }
  const KnotSet& knots() const { return knots_; }
  const std::vector<LocalCovParams>& local_params() const { return local_; }
  const std::vector<LocalCovParams>& knot_params() const { return knot_local_; }

  /// B (n x r), rows b(s_i)'.
  const Eigen::MatrixXd& basis() const { return basis_; }
  const KnotPrecision& precision() const { return precision_; }
  /// B L_K^{-T}.
  const Eigen::MatrixXd& whitened_basis() const { return whitened_; }
  const SparseSymMatrix& v() const { return v_; }
  /// Parent covariance on each pattern pair.
  const std::vector<double>& pair_parent_cov() const { return pair_parent_; }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  double log_det() const;
  double loglik(const Eigen::VectorXd& resid) const;

  /// Posterior of the whitened coefficients xi (eta = L_K^{-T} xi) given the
  /// residual: precision I + Bw' V^{-1} Bw.
  const Eigen::LLT<Eigen::MatrixXd>& inner_factor() const { return inner_; }
  const Eigen::MatrixXd& vinv_whitened() const { return vinv_whitened_; }

 private:
  void refresh_params();
  void refresh_knots();
  Eigen::VectorXd basis_column(const Location& k, const LocalCovParams& kp) const;

  std::shared_ptr<const FitGeometry> geometry_;
  ParentCovParams params_;
  KnotSet knots_;
  std::vector<LocalCovParams> local_;
  std::vector<LocalCovParams> knot_local_;
  std::vector<double> pair_parent_;
  Eigen::MatrixXd basis_;
  KnotPrecision precision_;
  Eigen::MatrixXd whitened_;
  SparseSymMatrix v_;
  Eigen::MatrixXd vinv_whitened_;
  Eigen::LLT<Eigen::MatrixXd> inner_;
};

Eigen::MatrixXd smw_solve(const DataCovOps& ops, const Eigen::MatrixXd& rhs);
double logdet_sigma_z(const DataCovOps& ops);
double gaussian_loglik(const DataCovOps& ops, const Eigen::VectorXd& resid);
DataCovOps add_knot_update(const DataCovOps& ops, const Location& k);
DataCovOps delete_knot_update(const DataCovOps& ops, int j);

/// Tapered remainder covariance plus nugget on the taper pattern, factorized.
SparseSymMatrix build_tapered_v(const LocationList& locs, const ParentCovParams& params,
                                const KnotSet& knots, const TaperSpec& taper, double noise_var);

/// Dense reference implementation with the same surface as DataCovOps: forms
/// Sigma_Z explicitly and factors it. Intended for n up to a few hundred.
class DenseDataCov {
 public:
  DenseDataCov(const LocationList& locs, const ParentCovParams& params, const KnotSet& knots,
               const TaperSpec& taper, double noise_var);

  const Eigen::MatrixXd& sigma_z() const { return sigma_; }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  double log_det() const;
  double loglik(const Eigen::VectorXd& resid) const;

 private:
  Eigen::MatrixXd sigma_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace nsfsa

#endif  // NSFSA_FSA_DATA_COV_HPP
