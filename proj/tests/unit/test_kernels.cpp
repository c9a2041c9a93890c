#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "nsfsa/kernels/matern.hpp"
#include "nsfsa/kernels/nonstationary.hpp"
#include "nsfsa/kernels/sv_params.hpp"
#include "nsfsa/kernels/taper.hpp"

using namespace nsfsa;

namespace {

LocalCovParams iso_local(double sigma, double smooth, const std::vector<double>& scales,
                         const std::vector<double>& angles = {}) {
  LocalCovParams p;
  p.sigma = sigma;
  p.smooth = smooth;
  p.aniso = anisotropy_matrix(scales, angles);
  p.log_det_aniso = 0.0;
  for (double s : scales) p.log_det_aniso += std::log(s);
  return p;
}

ParentCovParams wiggly_2d() {
  SvBasis basis;
  basis.centers = {make_location({0.2, 0.2}), make_location({0.8, 0.3}), make_location({0.5, 0.9})};
  basis.scale = 0.4;
  CovPriorSettings pr;
  pr.mu_sigma = 0.1;
  pr.mu_gamma = std::log(0.05);
  pr.coeff_var = 1.0;
  ParentCovParams p = ParentCovParams::with_priors(2, basis, pr);
  Eigen::VectorXd v = p.pack();
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd(0.0, 0.6);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += nd(gen);
  p.unpack(v);
  return p;
}

}  // namespace

TEST_CASE("Matern closed forms for smoothness 1/2 and 3/2") {
  for (double h : {1e-6, 0.01, 0.3, 1.0, 2.5, 10.0}) {
    CAPTURE(h);
    CHECK(matern_corr(h, 0.5) == doctest::Approx(std::exp(-std::sqrt(2.0) * h)).epsilon(1e-9));
    const double z = 2.0 * h * std::sqrt(1.5);
    CHECK(matern_corr(h, 1.5) == doctest::Approx((1.0 + z) * std::exp(-z)).epsilon(1e-9));
  }
}

TEST_CASE("Matern correlation is one at zero lag and vanishes far out") {
  for (double v : {0.01, 0.5, 1.0, 2.0, 3.0}) {
    CHECK(matern_corr(0.0, v) == 1.0);
    CHECK(matern_corr(1e-12, v) <= 1.0);
    CHECK(matern_corr(1e4, v) == 0.0);
    double prev = 1.0;
    for (double h = 0.01; h < 20.0; h *= 1.5) {
      const double m = matern_corr(h, v);
      CHECK(m <= prev);
      prev = m;
    }
  }
  CHECK_THROWS_AS(matern_corr(-1.0, 1.0), DomainError);
}

TEST_CASE("normal_cdf reference values") {
  CHECK(2.0 * normal_cdf(0.25) == doctest::Approx(1.197412651365847448).epsilon(1e-14));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(-40.0) >= 0.0);
}

TEST_CASE("Kanter taper values") {
  CHECK(kanter_taper(0.0) == 1.0);
  CHECK(kanter_taper(0.5) == doctest::Approx(2.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-14));
  CHECK(kanter_taper(1.0) == 0.0);
  CHECK(kanter_taper(1.7) == 0.0);
  CHECK(kanter_taper(1e-9) == doctest::Approx(1.0).epsilon(1e-12));
  double prev = 1.0;
  for (double x = 0.01; x < 1.0; x += 0.01) {
    const double t = kanter_taper(x);
    CHECK(t > 0.0);
    CHECK(t < prev);
    prev = t;
  }
  TaperSpec taper{6.5};
  CHECK(taper(0.0) == 1.0);
  CHECK(taper(6.5) == 0.0);
  CHECK(taper(3.25) == doctest::Approx(kanter_taper(0.5)));
  CHECK_THROWS_AS(kanter_taper(-0.1), DomainError);
}

TEST_CASE("anisotropy matrix has the scales as eigenvalues") {
  const std::vector<double> scales{4.0, 0.25};
  const SmallMatrix a = anisotropy_matrix(scales, std::vector<double>{0.7});
  CHECK(a.rows() == 2);
  CHECK(a(0, 1) == doctest::Approx(a(1, 0)));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es{Eigen::Matrix2d(a)};
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.25));
  CHECK(es.eigenvalues()(1) == doctest::Approx(4.0));
  // The major axis points along the rotation angle.
  const Eigen::Vector2d major = es.eigenvectors().col(1);
  CHECK(std::abs(major(1) / major(0)) == doctest::Approx(std::tan(0.7)));
  const SmallMatrix a3 = anisotropy_matrix(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{0.3, 0.4});
  CHECK(a3.determinant() == doctest::Approx(6.0));
}

TEST_CASE("nonstationary kernel with constant parameters reduces to the stationary Matern") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const LocalCovParams p = iso_local(1.7, 0.8, {2.0, 0.5}, {0.4});
  const Eigen::Matrix2d ainv = Eigen::Matrix2d(p.aniso).inverse();
  for (int k = 0; k < 50; ++k) {
    const Location s1 = make_location({u(gen), u(gen)});
    const Location s2 = make_location({u(gen), u(gen)});
    const Eigen::Vector2d h = s1 - s2;
    const double q = std::sqrt(h.dot(ainv * h));
    const double want = matern_corr(q, 0.8);
    CHECK(std::abs(nonstat_matern(s1, p, s2, p) - want) < 1e-12);
    CHECK(std::abs(parent_cov(s1, p, s2, p) - 1.7 * 1.7 * want) < 1e-12);
  }
  const LocalCovParams p1 = iso_local(1.0, 1.0, {9.0});
  const Location a = make_location({0.0});
  const Location b = make_location({3.0});
  CHECK(nonstat_matern(a, p1, b, p1) == doctest::Approx(matern_corr(1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("nonstationary kernel is symmetric with unit diagonal") {
  const ParentCovParams p = wiggly_2d();
  const Location s1 = make_location({0.1, 0.7});
  const Location s2 = make_location({0.6, 0.2});
  CHECK(nonstat_matern(s1, s2, p) == doctest::Approx(nonstat_matern(s2, s1, p)).epsilon(1e-14));
  CHECK(nonstat_matern(s1, s1, p) == doctest::Approx(1.0).epsilon(1e-14));
  const double sig = p.local_at(s1).sigma;
  CHECK(parent_cov(s1, s1, p) == doctest::Approx(sig * sig).epsilon(1e-14));
}

TEST_CASE("Gram matrix of the nonstationary covariance is positive semidefinite") {
  const ParentCovParams p = wiggly_2d();
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LocationList locs;
  for (int i = 0; i < 30; ++i) locs.push_back(make_location({u(gen), u(gen)}));
  Eigen::MatrixXd g(30, 30);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) g(i, j) = parent_cov(locs[i], locs[j], p);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  CHECK(es.eigenvalues().minCoeff() > -1e-10 * es.eigenvalues().maxCoeff());
}

TEST_CASE("spatially varying parameter links") {
  SvParamField f;
  f.link = Link::scaled_normal_cdf;
  f.cap = 2.0;
  f.offset = 0.25;
  f.coeffs = Eigen::VectorXd::Zero(2);
  CHECK(f.eval(Eigen::Vector2d(0.3, 0.9)) == doctest::Approx(1.197412651365847448).epsilon(1e-14));
  f.coeffs = Eigen::Vector2d(1.0, -2.0);
  CHECK(f.eval(Eigen::Vector2d(0.5, 0.25)) == doctest::Approx(2.0 * normal_cdf(0.25)).epsilon(1e-14));
  SvParamField g;
  g.link = Link::exp;
  g.offset = std::log(3.0);
  CHECK(g.eval(Eigen::VectorXd(0)) == doctest::Approx(3.0));
}

TEST_CASE("SV basis is a Gaussian bump") {
  SvBasis b;
  b.centers = {make_location({64.0}), make_location({192.0})};
  b.scale = 74.0;
  const Eigen::VectorXd v = b.evaluate(make_location({100.0}));
  CHECK(v(0) == doctest::Approx(std::exp(-std::pow(36.0 / 74.0, 2))));
  CHECK(v(1) == doctest::Approx(std::exp(-std::pow(92.0 / 74.0, 2))));
}

TEST_CASE("parameter pack and unpack round trip") {
  ParentCovParams p = wiggly_2d();
  const Eigen::VectorXd v = p.pack();
  CHECK(v.size() == p.free_size());
  ParentCovParams q = ParentCovParams::with_priors(2, p.basis, CovPriorSettings{0.0, 0.0, 0.25, 0.0, 1.0, 0.25, 0.0, 1.0, 1.0});
  q.unpack(v);
  CHECK((q.pack() - v).norm() == 0.0);
  CHECK(std::isfinite(p.log_prior()));
  CHECK(p.prior_variances().size() == v.size());
  // Stationary fields carry no coefficients.
  CovPriorSettings st;
  st.coeff_var = 0.0;
  const ParentCovParams s = ParentCovParams::with_priors(2, p.basis, st);
  CHECK(s.free_size() == 5);
}

TEST_CASE("Kanter taper is continuous at both ends of its support") {
  const double eps = 1e-4;
  CHECK(std::abs(kanter_taper(eps) - 1.0) <= 1e-6);
  CHECK(std::abs(kanter_taper(1.0 - eps)) <= 1e-4);
}

TEST_CASE("spatially varying parameters stay in range under prior draws") {
  SvBasis basis;
  basis.centers = {make_location({0.0, 0.0}), make_location({1.0, 0.0}), make_location({0.0, 1.0}),
                   make_location({1.0, 1.0})};
  basis.scale = 0.5;
  CovPriorSettings pr;
  pr.coeff_var = 0.0625;
  ParentCovParams p = ParentCovParams::with_priors(2, basis, pr);
  const Eigen::VectorXd sd = p.prior_variances().cwiseSqrt();
  Eigen::VectorXd mean = p.pack();
  std::mt19937_64 gen(12);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd v(mean.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = mean(i) + sd(i) * nd(gen);
    p.unpack(v);
    const Location s = make_location({u(gen), u(gen)});
    const LocalCovParams lp = p.local_at(s);
    CHECK(lp.sigma > 0.0);
    CHECK(lp.smooth > 0.0);
    CHECK(lp.smooth < 2.0);
    const double angle = sv_param_eval(p.angles[0], p.basis, s);
    CHECK(angle > 0.0);
    CHECK(angle < std::numbers::pi / 2.0);
    CHECK(sv_param_eval(p.scales[0], p.basis, s) > 0.0);
    CHECK(sv_param_eval(p.scales[1], p.basis, s) > 0.0);
  }
}
