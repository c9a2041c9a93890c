#include "nsfsa/kernels/nonstationary.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "nsfsa/kernels/matern.hpp"

namespace nsfsa {
namespace {

struct PairGeometry {
  double q;
  double log_det_mean;  // log |(A1 + A2) / 2|
};

PairGeometry pair_geometry(const Location& s1, const Location& s2, const SmallMatrix& a1,
                           const SmallMatrix& a2) {
  const Eigen::Index d = s1.size();
  if (s2.size() != d || a1.rows() != d || a2.rows() != d) {
    throw DomainError("sv_distance: dimension mismatch");
  }
  if (d == 1) {
    const double sum = a1(0, 0) + a2(0, 0);
    if (!(sum > 0.0)) throw NumericalError("sv_distance: A1 + A2 is not positive definite");
    const double h = s1(0) - s2(0);
    return {std::sqrt(2.0 * h * h / sum), std::log(0.5 * sum)};
  }
  const SmallMatrix sum = a1 + a2;
  Eigen::LLT<SmallMatrix> llt(sum);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("sv_distance: A1 + A2 is not positive definite");
  }
  const Location h = s1 - s2;
  const Location w = llt.matrixL().solve(h);
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) log_det += 2.0 * std::log(llt.matrixL()(j, j));
  log_det -= static_cast<double>(d) * std::numbers::ln2;
  return {std::sqrt(2.0 * w.squaredNorm()), log_det};
}

}  // namespace

double sv_distance(const Location& s1, const Location& s2, const SmallMatrix& a1,
                   const SmallMatrix& a2) {
  return pair_geometry(s1, s2, a1, a2).q;
}

double nonstat_matern(const Location& s1, const LocalCovParams& p1, const Location& s2,
                      const LocalCovParams& p2) {
  const PairGeometry g = pair_geometry(s1, s2, p1.aniso, p2.aniso);
  const double log_c = 0.25 * p1.log_det_aniso + 0.25 * p2.log_det_aniso - 0.5 * g.log_det_mean;
  return std::exp(log_c) * matern_corr(g.q, 0.5 * (p1.smooth + p2.smooth));
}

double parent_cov(const Location& s1, const LocalCovParams& p1, const Location& s2,
                  const LocalCovParams& p2) {
  return p1.sigma * p2.sigma * nonstat_matern(s1, p1, s2, p2);
}

double nonstat_matern(const Location& s1, const Location& s2, const ParentCovParams& params) {
  return nonstat_matern(s1, params.local_at(s1), s2, params.local_at(s2));
}

double parent_cov(const Location& s1, const Location& s2, const ParentCovParams& params) {
  return parent_cov(s1, params.local_at(s1), s2, params.local_at(s2));
}

}  // namespace nsfsa
