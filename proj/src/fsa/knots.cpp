#include "nsfsa/fsa/knots.hpp"

#include <Eigen/Cholesky>

#include "nsfsa/kernels/nonstationary.hpp"

namespace nsfsa {

KnotPrecision build_knot_precision(const KnotSet& knots, const std::vector<LocalCovParams>& knot_params) {
  const int r = knots.size();
  KnotPrecision out;
  if (r == 0) {
    out.corr_chol.resize(0, 0);
    return out;
  }
  Eigen::MatrixXd corr(r, r);
  for (int a = 0; a < r; ++a) {
    corr(a, a) = 1.0;
    for (int b = 0; b < a; ++b) {
      const double v = nonstat_matern(knots.knots[a], knot_params[a], knots.knots[b], knot_params[b]);
      corr(a, b) = v;
      corr(b, a) = v;
    }
  }
  for (double rel : {0.0, 1e-10, 1e-8, 1e-6}) {
    Eigen::MatrixXd shifted = corr;
    shifted.diagonal().array() += rel;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      out.corr_chol = llt.matrixL();
      out.jitter = rel;
      return out;
    }
  }
  throw NumericalError("knot correlation matrix is not positive definite after jitter (r=" +
                       std::to_string(r) + ")");
}

Eigen::VectorXd build_basis_row(const Location& s, const LocalCovParams& at_s, const KnotSet& knots,
                                const std::vector<LocalCovParams>& knot_params) {
  Eigen::VectorXd row(knots.size());
  for (int j = 0; j < knots.size(); ++j) {
    row(j) = at_s.sigma * nonstat_matern(s, at_s, knots.knots[j], knot_params[j]);
  }
  return row;
}

double predictive_cov(const Location& s1, const Location& s2, const ParentCovParams& params,
                      const KnotSet& knots) {
  if (knots.empty()) return 0.0;
  std::vector<LocalCovParams> kp;
  for (const auto& k : knots.knots) kp.push_back(params.local_at(k));
  const KnotPrecision w = build_knot_precision(knots, kp);
  const Eigen::VectorXd b1 = build_basis_row(s1, params.local_at(s1), knots, kp);
  const Eigen::VectorXd b2 = build_basis_row(s2, params.local_at(s2), knots, kp);
  const auto lower = w.corr_chol.triangularView<Eigen::Lower>();
  return lower.solve(b1).dot(lower.solve(b2));
}

double implied_cov_y(const Location& s1, const Location& s2, const ParentCovParams& params,
                     const KnotSet& knots, const TaperSpec& taper) {
  const double c_nu = predictive_cov(s1, s2, params, knots);
  const double t = taper((s1 - s2).norm());
  if (t == 0.0) return c_nu;
  return c_nu + t * (parent_cov(s1, s2, params) - c_nu);
}

}  // namespace nsfsa
