#ifndef NSFSA_KERNELS_SV_PARAMS_HPP
#define NSFSA_KERNELS_SV_PARAMS_HPP

#include <span>
#include <vector>

#include <Eigen/Core>

#include "nsfsa/common.hpp"

namespace nsfsa {

/// Fixed power-exponential basis shared by every spatially varying parameter:
/// b_j(s) = exp(-(|s - c_j| / scale)^2).
struct SvBasis {
  LocationList centers;
  double scale = 1.0;

  int size() const { return static_cast<int>(centers.size()); }
  Eigen::VectorXd evaluate(const Location& s) const;
  /// Row i holds the basis values at locs[i].
  Eigen::MatrixXd evaluate(const LocationList& locs) const;
};

enum class Link {
  exp,                ///< g(x) = exp(x), range (0, inf)
  scaled_normal_cdf,  ///< g(x) = cap * Phi(x), range (0, cap)
};

/// One spatially varying covariance parameter
/// theta(s) = g(offset + b(s)' coeffs), with a normal prior on the offset and
/// an isotropic normal prior on the coefficients. A zero coefficient prior
/// variance pins the coefficients at zero (stationary field).
struct SvParamField {
  double offset = 0.0;
  Eigen::VectorXd coeffs;
  Link link = Link::exp;
  double cap = 1.0;
  double prior_mean = 0.0;
  double prior_var = 1.0;
  double coeff_prior_var = 0.0;

  bool stationary() const { return coeff_prior_var == 0.0; }
  double transform(double linear) const;
  /// Evaluate from precomputed basis values b(s).
  double eval(const Eigen::Ref<const Eigen::VectorXd>& basis_values) const;
  double log_prior() const;
};

double sv_param_eval(const SvParamField& field, const SvBasis& basis, const Location& s);

/// Rotated anisotropy matrix R Gamma R'. `scales` has d entries and `angles`
/// d-1. For d = 3 the rotation applies angles[0] in the (1,2)-plane first and
/// then angles[1] in the (1,3)-plane.
SmallMatrix anisotropy_matrix(std::span<const double> scales, std::span<const double> angles);

/// Parent-covariance parameters evaluated at a single location.
struct LocalCovParams {
  double sigma = 1.0;
  double smooth = 1.0;
  SmallMatrix aniso;
  double log_det_aniso = 0.0;
};

/// Prior hyperparameters; the defaults are the usual table of priors with
/// application-specific means for the standard deviation and scale.
struct CovPriorSettings {
  double mu_sigma = 0.0;
  double mu_gamma = 0.0;
  double sigma_var = 0.25;
  double smooth_mean = 0.0;
  double smooth_var = 1.0;
  double scale_var = 0.25;
  double angle_mean = 0.0;
  double angle_var = 1.0;
  double coeff_var = 0.0625;
};

/// The full parameter bundle of the nonstationary Matern parent covariance.
struct ParentCovParams {
  int dim = 1;
  SvBasis basis;
  SvParamField sigma;
  SvParamField smooth;
  std::vector<SvParamField> scales;  // d entries
  std::vector<SvParamField> angles;  // d-1 entries

  /// Offsets at their prior means, coefficients zero.
  static ParentCovParams with_priors(int dim, SvBasis basis, const CovPriorSettings& priors);

  std::vector<const SvParamField*> fields() const;
  std::vector<SvParamField*> fields();

  LocalCovParams local(const Eigen::Ref<const Eigen::VectorXd>& basis_values) const;
  LocalCovParams local_at(const Location& s) const;
  /// One entry per row of `basis_values`.
  std::vector<LocalCovParams> local_all(const Eigen::MatrixXd& basis_values) const;

  /// Unconstrained parameter vector: for each field its offset followed by its
  /// coefficients (omitted for stationary fields).
  int free_size() const;
  Eigen::VectorXd pack() const;
  void unpack(const Eigen::Ref<const Eigen::VectorXd>& values);
  Eigen::VectorXd prior_variances() const;
  double log_prior() const;
};

}  // namespace nsfsa

#endif  // NSFSA_KERNELS_SV_PARAMS_HPP
