#include "nsfsa/kernels/sv_params.hpp"

#include <cmath>
#include <numbers>

#include "nsfsa/kernels/matern.hpp"

namespace nsfsa {
namespace {

double normal_logpdf(double x, double mean, double var) {
  const double z = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + z * z / var);
}

SvParamField make_field(Link link, double cap, double mean, double var, double coeff_var,
                        int basis_size) {
  SvParamField f;
  f.link = link;
  f.cap = cap;
  f.prior_mean = mean;
  f.prior_var = var;
  f.coeff_prior_var = coeff_var;
  f.offset = mean;
  f.coeffs = Eigen::VectorXd::Zero(basis_size);
  return f;
}

}  // namespace

Eigen::VectorXd SvBasis::evaluate(const Location& s) const {
  Eigen::VectorXd out(size());
  for (int j = 0; j < size(); ++j) {
    const double u = (s - centers[j]).norm() / scale;
    out(j) = std::exp(-u * u);
  }
  return out;
}

Eigen::MatrixXd SvBasis::evaluate(const LocationList& locs) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(locs.size()), size());
  for (std::size_t i = 0; i < locs.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = evaluate(locs[i]).transpose();
  return out;
}

double SvParamField::transform(double linear) const {
  switch (link) {
    case Link::exp:
      return std::exp(linear);
    case Link::scaled_normal_cdf:
      return cap * normal_cdf(linear);
  }
  return linear;
}

double SvParamField::eval(const Eigen::Ref<const Eigen::VectorXd>& basis_values) const {
  double linear = offset;
  if (coeffs.size() > 0) linear += basis_values.dot(coeffs);
  return transform(linear);
}

double SvParamField::log_prior() const {
  double lp = normal_logpdf(offset, prior_mean, prior_var);
  if (!stationary()) {
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) lp += normal_logpdf(coeffs(j), 0.0, coeff_prior_var);
  }
  return lp;
}

double sv_param_eval(const SvParamField& field, const SvBasis& basis, const Location& s) {
  return field.eval(basis.evaluate(s));
}

SmallMatrix anisotropy_matrix(std::span<const double> scales, std::span<const double> angles) {
  const int d = static_cast<int>(scales.size());
  if (d < 1 || d > kMaxDim || static_cast<int>(angles.size()) != d - 1) {
    throw DomainError("anisotropy_matrix: need d in {1,2,3} scales and d-1 angles");
  }
  SmallMatrix gamma = SmallMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) gamma(j, j) = scales[j];
  if (d == 1) return gamma;

  auto plane_rotation = [d](int a, int b, double angle) {
    SmallMatrix r = SmallMatrix::Identity(d, d);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    r(a, a) = c;
    r(a, b) = -s;
    r(b, a) = s;
    r(b, b) = c;
    return r;
  };
  SmallMatrix rot = plane_rotation(0, 1, angles[0]);
  if (d == 3) rot = plane_rotation(0, 2, angles[1]) * rot;
  SmallMatrix out = rot * gamma * rot.transpose();
  // Symmetrize away rounding.
  return 0.5 * (out + out.transpose());
}

ParentCovParams ParentCovParams::with_priors(int dim, SvBasis basis, const CovPriorSettings& priors) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("spatial dimension must be 1, 2 or 3");
  ParentCovParams p;
  p.dim = dim;
  const int rb = basis.size();
  p.basis = std::move(basis);
  p.sigma = make_field(Link::exp, 1.0, priors.mu_sigma, priors.sigma_var, priors.coeff_var, rb);
  p.smooth = make_field(Link::scaled_normal_cdf, 2.0, priors.smooth_mean, priors.smooth_var,
                        priors.coeff_var, rb);
  for (int j = 0; j < dim; ++j) {
    p.scales.push_back(
        make_field(Link::exp, 1.0, priors.mu_gamma, priors.scale_var, priors.coeff_var, rb));
  }
  for (int j = 0; j + 1 < dim; ++j) {
    p.angles.push_back(make_field(Link::scaled_normal_cdf, std::numbers::pi / 2.0,
                                  priors.angle_mean, priors.angle_var, priors.coeff_var, rb));
  }
  return p;
}

std::vector<const SvParamField*> ParentCovParams::fields() const {
  std::vector<const SvParamField*> out{&sigma, &smooth};
  for (const auto& f : scales) out.push_back(&f);
  for (const auto& f : angles) out.push_back(&f);
  return out;
}

std::vector<SvParamField*> ParentCovParams::fields() {
  std::vector<SvParamField*> out{&sigma, &smooth};
  for (auto& f : scales) out.push_back(&f);
  for (auto& f : angles) out.push_back(&f);
  return out;
}

LocalCovParams ParentCovParams::local(const Eigen::Ref<const Eigen::VectorXd>& basis_values) const {
  LocalCovParams lp;
  lp.sigma = sigma.eval(basis_values);
  lp.smooth = smooth.eval(basis_values);
  double sc[kMaxDim];
  double an[kMaxDim];
  lp.log_det_aniso = 0.0;
  for (int j = 0; j < dim; ++j) {
    sc[j] = scales[j].eval(basis_values);
    lp.log_det_aniso += std::log(sc[j]);
  }
  for (int j = 0; j + 1 < dim; ++j) an[j] = angles[j].eval(basis_values);
  lp.aniso = anisotropy_matrix(std::span<const double>(sc, dim), std::span<const double>(an, dim - 1));
  return lp;
}

LocalCovParams ParentCovParams::local_at(const Location& s) const { return local(basis.evaluate(s)); }

std::vector<LocalCovParams> ParentCovParams::local_all(const Eigen::MatrixXd& basis_values) const {
  std::vector<LocalCovParams> out;
  out.reserve(static_cast<std::size_t>(basis_values.rows()));
  Eigen::VectorXd row(basis_values.cols());
  for (Eigen::Index i = 0; i < basis_values.rows(); ++i) {
    row = basis_values.row(i).transpose();
    out.push_back(local(row));
  }
  return out;
}

int ParentCovParams::free_size() const {
  int n = 0;
  for (const auto* f : fields()) n += 1 + (f->stationary() ? 0 : static_cast<int>(f->coeffs.size()));
  return n;
}

Eigen::VectorXd ParentCovParams::pack() const {
  Eigen::VectorXd out(free_size());
  int k = 0;
  for (const auto* f : fields()) {
    out(k++) = f->offset;
    if (!f->stationary()) {
      for (Eigen::Index j = 0; j < f->coeffs.size(); ++j) out(k++) = f->coeffs(j);
    }
  }
  return out;
}

void ParentCovParams::unpack(const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() != free_size()) throw ConfigError("parameter vector has the wrong length");
  int k = 0;
  for (auto* f : fields()) {
    f->offset = values(k++);
    if (!f->stationary()) {
      for (Eigen::Index j = 0; j < f->coeffs.size(); ++j) f->coeffs(j) = values(k++);
    }
  }
}

Eigen::VectorXd ParentCovParams::prior_variances() const {
  Eigen::VectorXd out(free_size());
  int k = 0;
  for (const auto* f : fields()) {
    out(k++) = f->prior_var;
    if (!f->stationary()) {
      for (Eigen::Index j = 0; j < f->coeffs.size(); ++j) out(k++) = f->coeff_prior_var;
    }
  }
  return out;
}

double ParentCovParams::log_prior() const {
  double lp = 0.0;
  for (const auto* f : fields()) lp += f->log_prior();
  return lp;
}

}  // namespace nsfsa
