#include "nsfsa/fsa/sparse_sym.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

namespace nsfsa {
namespace {

std::atomic<std::uint64_t> g_analysis_count{0};

// Nonzero pattern of row k of L (excluding the diagonal), written to
// stack[top..n). `mark` must be all false on entry and is restored.
int ereach(const std::vector<int>& cp, const std::vector<int>& ci, const std::vector<int>& parent,
           int k, std::vector<int>& stack, std::vector<char>& mark) {
  const int n = static_cast<int>(parent.size());
  int top = n;
  mark[k] = 1;
  for (int p = cp[k]; p < cp[k + 1]; ++p) {
    int i = ci[p];
    if (i > k) continue;
    int len = 0;
    for (; !mark[i]; i = parent[i]) {
      stack[len++] = i;
      mark[i] = 1;
    }
    while (len > 0) stack[--top] = stack[--len];
  }
  for (int p = top; p < n; ++p) mark[stack[p]] = 0;
  mark[k] = 0;
  return top;
}

}  // namespace

SparsePattern::SparsePattern(int n, std::vector<IndexPair> pairs) : n_(n), pairs_(std::move(pairs)) {
  if (n_ < 0) throw DomainError("SparsePattern: negative size");
  diag_pair_.assign(n_, -1);
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    auto& pr = pairs_[k];
    if (pr.i > pr.j) std::swap(pr.i, pr.j);
    if (pr.i < 0 || pr.j >= n_) throw DomainError("SparsePattern: pair index out of range");
    if (pr.i == pr.j) diag_pair_[pr.i] = static_cast<int>(k);
  }
  for (int i = 0; i < n_; ++i) {
    if (diag_pair_[i] < 0) throw DomainError("SparsePattern: missing diagonal entry");
  }

  // Fill-reducing ordering (approximate minimum degree) on the symmetric pattern.
  perm_.resize(n_);
  if (n_ > 0) {
    std::vector<Eigen::Triplet<double, int>> trips;
    trips.reserve(2 * pairs_.size());
    for (const auto& pr : pairs_) {
      trips.emplace_back(pr.i, pr.j, 1.0);
      if (pr.i != pr.j) trips.emplace_back(pr.j, pr.i, 1.0);
    }
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> a(n_, n_);
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> order;
    Eigen::AMDOrdering<int> amd;
    amd(a, order);
    for (int k = 0; k < n_; ++k) perm_[k] = order.indices()(k);
  }
  pinv_.resize(n_);
  for (int k = 0; k < n_; ++k) pinv_[perm_[k]] = k;

  // Upper triangle of P A P' by columns.
  cp_.assign(n_ + 1, 0);
  for (const auto& pr : pairs_) {
    const int a = pinv_[pr.i];
    const int b = pinv_[pr.j];
    ++cp_[std::max(a, b) + 1];
  }
  for (int k = 0; k < n_; ++k) cp_[k + 1] += cp_[k];
  ci_.resize(pairs_.size());
  pair_slot_.resize(pairs_.size());
  std::vector<int> next(cp_.begin(), cp_.end() - 1);
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const int a = pinv_[pairs_[k].i];
    const int b = pinv_[pairs_[k].j];
    const int col = std::max(a, b);
    const int slot = next[col]++;
    ci_[slot] = std::min(a, b);
    pair_slot_[k] = slot;
  }

  // Elimination tree.
  parent_.assign(n_, -1);
  std::vector<int> ancestor(n_, -1);
  for (int k = 0; k < n_; ++k) {
    for (int p = cp_[k]; p < cp_[k + 1]; ++p) {
      int i = ci_[p];
      while (i != -1 && i < k) {
        const int inext = ancestor[i];
        ancestor[i] = k;
        if (inext == -1) parent_[i] = k;
        i = inext;
      }
    }
  }

  // Column counts of L from the row patterns.
  std::vector<std::int64_t> counts(n_, 1);
  std::vector<int> stack(n_);
  std::vector<char> mark(n_, 0);
  for (int k = 0; k < n_; ++k) {
    const int top = ereach(cp_, ci_, parent_, k, stack, mark);
    for (int p = top; p < n_; ++p) ++counts[stack[p]];
  }
  lp_.assign(n_ + 1, 0);
  for (int k = 0; k < n_; ++k) lp_[k + 1] = lp_[k] + counts[k];

  g_analysis_count.fetch_add(1, std::memory_order_relaxed);
}

std::int64_t SparsePattern::nnz_symmetric() const {
  std::int64_t count = 0;
  for (const auto& pr : pairs_) count += pr.i == pr.j ? 1 : 2;
  return count;
}

std::uint64_t SparsePattern::analysis_count() { return g_analysis_count.load(std::memory_order_relaxed); }

SparseSymMatrix::SparseSymMatrix(std::shared_ptr<const SparsePattern> pattern)
    : pattern_(std::move(pattern)), values_(pattern_->pairs().size(), 0.0) {}

void SparseSymMatrix::set_pair_values(std::span<const double> values) {
  if (values.size() != values_.size()) throw DomainError("SparseSymMatrix: value count mismatch");
  for (std::size_t k = 0; k < values.size(); ++k) set_pair_value(static_cast<int>(k), values[k]);
}

bool SparseSymMatrix::try_factorize(double diag_shift, int* failed_col, double* failed_pivot) {
  const SparsePattern& pat = *pattern_;
  const int n = pat.n_;
  li_.assign(pat.lp_.back(), 0);
  lx_.assign(pat.lp_.back(), 0.0);
  std::vector<std::int64_t> c(pat.lp_.begin(), pat.lp_.end() - 1);
  std::vector<double> x(n, 0.0);
  std::vector<int> stack(n);
  std::vector<char> mark(n, 0);

  for (int k = 0; k < n; ++k) {
    const int top = ereach(pat.cp_, pat.ci_, pat.parent_, k, stack, mark);
    x[k] = 0.0;
    for (int p = pat.cp_[k]; p < pat.cp_[k + 1]; ++p) {
      const int i = pat.ci_[p];
      if (i <= k) x[i] = values_[p];
    }
    double d = x[k] + diag_shift;
    x[k] = 0.0;
    for (int t = top; t < n; ++t) {
      const int i = stack[t];
      const double lki = x[i] / lx_[pat.lp_[i]];
      x[i] = 0.0;
      for (std::int64_t p = pat.lp_[i] + 1; p < c[i]; ++p) {
        x[li_[p]] -= lx_[p] * lki;
      }
      d -= lki * lki;
      const std::int64_t p = c[i]++;
      li_[p] = k;
      lx_[p] = lki;
    }
    if (!(d > 0.0)) {
      *failed_col = pat.perm_[k];
      *failed_pivot = d;
      return false;
    }
    const std::int64_t p = c[k]++;
    li_[p] = k;
    lx_[p] = std::sqrt(d);
  }
  return true;
}

void SparseSymMatrix::factorize() {
  ++factorizations_;
  int failed_col = -1;
  double failed_pivot = 0.0;
  jitter_ = 0.0;
  if (try_factorize(0.0, &failed_col, &failed_pivot)) {
    factorized_ = true;
    return;
  }
  double mean_diag = 0.0;
  for (int i = 0; i < size(); ++i) mean_diag += pair_value(pattern_->diagonal_pair(i));
  mean_diag = size() > 0 ? std::abs(mean_diag) / size() : 1.0;
  for (double rel : {1e-10, 1e-8, 1e-6}) {
    jitter_ = rel * mean_diag;
    if (try_factorize(jitter_, &failed_col, &failed_pivot)) {
      factorized_ = true;
      return;
    }
  }
  factorized_ = false;
  std::ostringstream msg;
  msg << "sparse Cholesky failed after jitter escalation (n=" << size() << ", row " << failed_col
      << ", pivot " << failed_pivot << ", mean diagonal " << mean_diag << ")";
  throw NumericalError(msg.str());
}

void SparseSymMatrix::require_factor() const {
  if (!factorized_) throw NumericalError("SparseSymMatrix: matrix is not factorized");
}

Eigen::VectorXd SparseSymMatrix::solve(const Eigen::VectorXd& rhs) const {
  require_factor();
  const SparsePattern& pat = *pattern_;
  const int n = pat.n_;
  if (rhs.size() != n) throw DomainError("SparseSymMatrix::solve: size mismatch");
  Eigen::VectorXd y(n);
  for (int k = 0; k < n; ++k) y(k) = rhs(pat.perm_[k]);
  for (int j = 0; j < n; ++j) {
    const std::int64_t p0 = pat.lp_[j];
    y(j) /= lx_[p0];
    const double yj = y(j);
    for (std::int64_t p = p0 + 1; p < pat.lp_[j + 1]; ++p) {
      y(li_[p]) -= lx_[p] * yj;
    }
  }
  for (int j = n - 1; j >= 0; --j) {
    const std::int64_t p0 = pat.lp_[j];
    double acc = y(j);
    for (std::int64_t p = p0 + 1; p < pat.lp_[j + 1]; ++p) {
      acc -= lx_[p] * y(li_[p]);
    }
    y(j) = acc / lx_[p0];
  }
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) out(pat.perm_[k]) = y(k);
  return out;
}

Eigen::MatrixXd SparseSymMatrix::solve(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd out(rhs.rows(), rhs.cols());
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) out.col(c) = solve(Eigen::VectorXd(rhs.col(c)));
  return out;
}

double SparseSymMatrix::log_det() const {
  require_factor();
  double acc = 0.0;
  for (int j = 0; j < size(); ++j) acc += std::log(lx_[pattern_->lp_[j]]);
  return 2.0 * acc;
}

Eigen::VectorXd SparseSymMatrix::factor_times(const Eigen::VectorXd& z) const {
  require_factor();
  const SparsePattern& pat = *pattern_;
  const int n = pat.n_;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    const double zj = z(j);
    for (std::int64_t p = pat.lp_[j]; p < pat.lp_[j + 1]; ++p) {
      y(li_[p]) += lx_[p] * zj;
    }
  }
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) out(pat.perm_[k]) = y(k);
  return out;
}

Eigen::VectorXd SparseSymMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  const auto& pairs = pattern_->pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double v = pair_value(static_cast<int>(k));
    out(pairs[k].i) += v * x(pairs[k].j);
    if (pairs[k].i != pairs[k].j) out(pairs[k].j) += v * x(pairs[k].i);
  }
  return out;
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size(), size());
  const auto& pairs = pattern_->pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double v = pair_value(static_cast<int>(k));
    out(pairs[k].i, pairs[k].j) = v;
    out(pairs[k].j, pairs[k].i) = v;
  }
  return out;
}

}  // namespace nsfsa
