#ifndef NSFSA_FSA_SPARSE_SYM_HPP
#define NSFSA_FSA_SPARSE_SYM_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nsfsa/fsa/neighbors.hpp"

namespace nsfsa {

/// Fixed sparsity pattern of a symmetric matrix together with its
/// fill-reducing ordering and symbolic Cholesky structure. Built once and
/// shared (read-only) by every matrix using the pattern.
class SparsePattern {
 public:
  /// `pairs` must contain every diagonal entry (i, i).
  SparsePattern(int n, std::vector<IndexPair> pairs);

  int size() const { return n_; }
  int nnz_pairs() const { return static_cast<int>(pairs_.size()); }
  /// Nonzeros counting both triangles.
  std::int64_t nnz_symmetric() const;
  std::int64_t nnz_factor() const { return lp_.back(); }
  const std::vector<IndexPair>& pairs() const { return pairs_; }
  int diagonal_pair(int i) const { return diag_pair_[i]; }
  /// perm[k] is the original index placed at position k.
  const std::vector<int>& permutation() const { return perm_; }

  /// Number of symbolic analyses (orderings) performed process-wide.
  static std::uint64_t analysis_count();

 private:
  friend class SparseSymMatrix;
  int n_;
  std::vector<IndexPair> pairs_;
  std::vector<int> diag_pair_;
  std::vector<int> perm_;
  std::vector<int> pinv_;
  // Upper triangle of the permuted matrix in compressed-column form.
  std::vector<int> cp_;
  std::vector<int> ci_;
  std::vector<int> pair_slot_;
  // Elimination tree and column pointers of the Cholesky factor.
  std::vector<int> parent_;
  std::vector<std::int64_t> lp_;
};

/// Symmetric positive-definite sparse matrix on a fixed pattern with a cached
/// Cholesky factor. Copies share the pattern and own their values.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  explicit SparseSymMatrix(std::shared_ptr<const SparsePattern> pattern);

  const SparsePattern& pattern() const { return *pattern_; }
  const std::shared_ptr<const SparsePattern>& pattern_ptr() const { return pattern_; }
  int size() const { return pattern_->size(); }

  /// Value of pattern pair k (same order as pattern().pairs()).
  void set_pair_value(int k, double v) { values_[pattern_->pair_slot_[k]] = v; factorized_ = false; }
  double pair_value(int k) const { return values_[pattern_->pair_slot_[k]]; }
  void set_pair_values(std::span<const double> values);

  /// Cholesky factorization reusing the pattern's ordering. On failure the
  /// diagonal is inflated by 1e-10, 1e-8 and then 1e-6 times its mean before
  /// giving up with NumericalError.
  void factorize();
  bool factorized() const { return factorized_; }
  double jitter() const { return jitter_; }
  std::uint64_t factorization_count() const { return factorizations_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  double log_det() const;
  /// Returns P' L z, which has covariance equal to this matrix for z ~ N(0, I).
  Eigen::VectorXd factor_times(const Eigen::VectorXd& z) const;

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;

 private:
  bool try_factorize(double diag_shift, int* failed_col, double* failed_pivot);
  void require_factor() const;

  std::shared_ptr<const SparsePattern> pattern_;
  std::vector<double> values_;
  std::vector<int> li_;
  std::vector<double> lx_;
  bool factorized_ = false;
  double jitter_ = 0.0;
  std::uint64_t factorizations_ = 0;
};

}  // namespace nsfsa

#endif  // NSFSA_FSA_SPARSE_SYM_HPP
