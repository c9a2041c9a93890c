#include <doctest.h>

#include <cmath>
#include <random>
#include <cstring>
#include <sstream>

#include <Eigen/Cholesky>

#include "nsfsa/kernels/nonstationary.hpp"
#include "nsfsa/predictor/predictor.hpp"
#include "test_support.hpp"

using namespace nsfsa;
using namespace nsfsa::test;

namespace {

struct Setup {
  LocationList obs;
  LocationList pred;
  ParentCovParams params;
  KnotSet knots;
  TaperSpec taper{4.0};
  double noise_var = 0.05;
};

Setup make_setup(int n, int r, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  Setup s;
  for (int i = 0; i < n; ++i) s.obs.push_back(make_location({u(gen), 0.5 * u(gen)}));
  for (int j = 0; j < r; ++j) s.knots.knots.push_back(make_location({u(gen), 0.5 * u(gen)}));
  SvBasis basis;
  basis.centers = {make_location({5.0, 5.0}), make_location({15.0, 5.0})};
  basis.scale = 8.0;
  CovPriorSettings pr;
  pr.mu_sigma = 0.2;
  pr.mu_gamma = 2.0 * std::log(2.5);
  pr.coeff_var = 0.25;
  s.params = ParentCovParams::with_priors(2, basis, pr);
  Eigen::VectorXd v = s.params.pack();
  std::normal_distribution<double> nd(0.0, 0.3);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += nd(gen);
  s.params.unpack(v);
  return s;
}

// Dense tapered remainder covariance over an arbitrary list of locations.
Eigen::MatrixXd dense_vdelta(const Setup& s, const LocationList& locs) {
  const int n = static_cast<int>(locs.size());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out(i, j) = s.taper((locs[i] - locs[j]).norm()) *
                  (parent_cov(locs[i], locs[j], s.params) - predictive_cov(locs[i], locs[j], s.params, s.knots));
  return out;
}

Eigen::MatrixXd dense_basis(const Setup& s, const LocationList& locs) {
  std::vector<LocalCovParams> kp;
  for (const auto& k : s.knots.knots) kp.push_back(s.params.local_at(k));
  Eigen::MatrixXd b(static_cast<Eigen::Index>(locs.size()), s.knots.size());
  for (std::size_t i = 0; i < locs.size(); ++i)
    b.row(static_cast<Eigen::Index>(i)) = build_basis_row(locs[i], s.params.local_at(locs[i]), s.knots, kp).transpose();
  return b;
}

Eigen::MatrixXd knot_corr(const Setup& s) {
  const int r = s.knots.size();
  Eigen::MatrixXd rk(r, r);
  for (int a = 0; a < r; ++a)
    for (int c = 0; c < r; ++c) rk(a, c) = a == c ? 1.0 : nonstat_matern(s.knots.knots[a], s.knots.knots[c], s.params);
  return rk;
}

DataCovOps ops_of(const Setup& s) {
  return DataCovOps(FitGeometry::build(s.obs, s.taper, s.noise_var, s.params.basis), s.params, s.knots);
}

Eigen::VectorXd random_resid(int n, std::uint64_t seed) {
  Rng rng(seed);
  return rng.normal_vector(n);
}

}  // namespace

TEST_CASE("eta posterior moments match the dense conditional-Gaussian formula") {
  const Setup s = make_setup(50, 6, 1);
  const DataCovOps ops = ops_of(s);
  const Eigen::VectorXd resid = random_resid(50, 2);
  Eigen::MatrixXd v = dense_vdelta(s, s.obs);
  v.diagonal().array() += s.noise_var;
  const Eigen::MatrixXd b = dense_basis(s, s.obs);
  const Eigen::MatrixXd prec = b.transpose() * v.llt().solve(b) + knot_corr(s);
  const Eigen::MatrixXd cov = prec.llt().solve(Eigen::MatrixXd::Identity(6, 6));
  const Eigen::VectorXd mean = cov * (b.transpose() * v.llt().solve(resid));
  const EtaMoments m = eta_moments(ops, resid);
  CHECK((m.mean - mean).norm() / mean.norm() < 1e-8);
  CHECK((m.cov - cov).norm() / cov.norm() < 1e-8);
  CHECK(eta_moments(ops, Eigen::VectorXd::Zero(50)).mean.norm() == 0.0);

  Rng rng(3);
  const int draws = 20000;
  Eigen::MatrixXd x(6, draws);
  for (int k = 0; k < draws; ++k) x.col(k) = sample_eta(ops, resid, rng);
  const Eigen::VectorXd emean = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - emean;
  const Eigen::MatrixXd ecov = centered * centered.transpose() / (draws - 1.0);
  for (int a = 0; a < 6; ++a) {
    CHECK(std::abs(emean(a) - mean(a)) < 3.0 * std::sqrt(cov(a, a) / draws));
    CHECK(ecov(a, a) == doctest::Approx(cov(a, a)).epsilon(0.05));
  }
}

TEST_CASE("sample_eta with no knots is empty") {
  Setup s = make_setup(10, 0, 4);
  Rng rng(1);
  CHECK(sample_eta(ops_of(s), random_resid(10, 1), rng).size() == 0);
}

TEST_CASE("conditional delta draws match the dense conditional moments") {
  const Setup base = make_setup(40, 4, 7);
  Setup s = base;
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int p = 0; p < 9; ++p) s.pred.push_back(make_location({u(gen), 0.5 * u(gen)}));
  s.pred.push_back(s.obs[5]);  // one prediction location coincides with an observation
  const int np = 10;
  const DataCovOps ops = ops_of(s);
  const PredictionSet pset = PredictionSet::build(s.pred, Eigen::MatrixXd::Ones(np, 1), s.obs);
  CHECK(pset.overlap[9] == 5);
  const Eigen::VectorXd resid = random_resid(40, 9);
  Rng er(10);
  const Eigen::VectorXd eta = sample_eta(ops, resid, er);

  LocationList joint = s.obs;
  joint.insert(joint.end(), s.pred.begin(), s.pred.end());
  const Eigen::MatrixXd vj = dense_vdelta(s, joint);
  Eigen::MatrixXd voo = vj.topLeftCorner(40, 40);
  voo.diagonal().array() += s.noise_var;
  const Eigen::MatrixXd vpo = vj.bottomLeftCorner(np, 40);
  const Eigen::MatrixXd vpp = vj.bottomRightCorner(np, np);
  const Eigen::LLT<Eigen::MatrixXd> llt(voo);
  const Eigen::VectorXd w = resid - dense_basis(s, s.obs) * eta;
  const Eigen::VectorXd mean = vpo * llt.solve(w);
  const Eigen::MatrixXd cov = vpp - vpo * llt.solve(vpo.transpose());

  const DeltaSimulator sim(ops.geometry_ptr(), pset);
  Rng rng(12);
  const int draws = 20000;
  Eigen::MatrixXd x(np, draws);
  for (int k = 0; k < draws; ++k) x.col(k) = sim.draw(ops, eta, resid, rng);
  const Eigen::VectorXd emean = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - emean;
  const Eigen::MatrixXd ecov = centered * centered.transpose() / (draws - 1.0);
  // Joint check on the mean error: chi-square with np degrees of freedom, 0.999 quantile.
  const Eigen::VectorXd err = emean - mean;
  CHECK(draws * err.dot(cov.llt().solve(err)) < 29.59);
  for (int a = 0; a < np; ++a) {
    CAPTURE(a);
    CHECK(std::abs(emean(a) - mean(a)) < 3.0 * std::sqrt(cov(a, a) / draws) + 1e-12);
    for (int c = 0; c < np; ++c) {
      // Entries that are tiny relative to the variances are held to an absolute bound.
      const double scale = std::sqrt(cov(a, a) * cov(c, c));
      CHECK(std::abs(ecov(a, c) - cov(a, c)) <= std::max(0.05 * std::abs(cov(a, c)), 0.03 * scale));
    }
  }
  // The free-function form draws from the same law.
  Rng r2(12);
  CHECK(conditional_sim_delta(ops, eta, resid, pset, r2).size() == np);
}

TEST_CASE("prediction far from all data is an unconditional draw") {
  Setup s = make_setup(30, 0, 12);
  for (int p = 0; p < 5; ++p) s.pred.push_back(make_location({100.0 + 10.0 * p, 50.0}));
  const DataCovOps ops = ops_of(s);
  const PredictionSet pset = PredictionSet::build(s.pred, Eigen::MatrixXd::Ones(5, 1), s.obs);
  const DeltaSimulator sim(ops.geometry_ptr(), pset);
  const Eigen::VectorXd resid = random_resid(30, 4);
  const Eigen::VectorXd r1 = 1000.0 * resid;
  Rng a(5), b(5);
  // Identical random streams give identical draws whatever the data say.
  CHECK((sim.draw(ops, Eigen::VectorXd(0), resid, a) - sim.draw(ops, Eigen::VectorXd(0), r1, b)).norm() < 1e-9);
  const Eigen::MatrixXd cross = sim.joint_cov(ops).to_dense().bottomLeftCorner(5, 30);
  CHECK(cross.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noiseless interpolation at an observed location") {
  Setup s = make_setup(25, 0, 13);
  s.noise_var = 1e-10;
  s.pred = {s.obs[3], s.obs[17]};
  const DataCovOps ops = ops_of(s);
  const PredictionSet pset = PredictionSet::build(s.pred, Eigen::MatrixXd::Ones(2, 1), s.obs);
  const Eigen::VectorXd resid = random_resid(25, 6);
  Rng rng(2);
  const Eigen::VectorXd d = conditional_sim_delta(ops, Eigen::VectorXd(0), resid, pset, rng);
  CHECK(d(0) == doctest::Approx(resid(3)).epsilon(1e-3));
  CHECK(d(1) == doctest::Approx(resid(17)).epsilon(1e-3));
}

TEST_CASE("prediction set overlap detection") {
  const LocationList obs{make_location({1.0, 2.0}), make_location({1.0, 3.0}), make_location({4.0, 2.0})};
  const LocationList pred{make_location({1.0, 3.0}), make_location({1.0, 3.0 + 1e-13}),
                          make_location({1.0, 3.0 + 1e-9}), make_location({4.0, 2.0})};
  const PredictionSet ps = PredictionSet::build(pred, Eigen::MatrixXd::Ones(4, 1), obs);
  CHECK(ps.overlap == std::vector<int>{1, 1, -1, 2});
  CHECK_THROWS_AS(PredictionSet::build(pred, Eigen::MatrixXd::Ones(3, 1), obs), ConfigError);
}

TEST_CASE("quantiles and summaries") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 5.0);
  CHECK(quantile_sorted(v, 0.5) == 3.0);
  CHECK(quantile_sorted(v, 0.1) == doctest::Approx(1.4));
  CHECK(quantile_sorted(v, 0.975) == doctest::Approx(4.9));
  Eigen::MatrixXd draws(2, 5);
  draws << 1, 2, 3, 4, 5, 10, 10, 10, 10, 10;
  const PosteriorField f = summarize_draws({make_location({0.0}), make_location({1.0})}, draws, 0.8);
  CHECK(f.mean(0) == 3.0);
  CHECK(f.sd(0) == doctest::Approx(std::sqrt(2.5)));
  CHECK(f.lower(0) == doctest::Approx(1.4));
  CHECK(f.upper(0) == doctest::Approx(4.6));
  CHECK(f.sd(1) == 0.0);
  CHECK(f.lower(1) == 10.0);
  std::ostringstream csv;
  f.write_csv(csv);
  CHECK(csv.str().rfind("s1,mean,sd,lower,upper\n", 0) == 0);
}

TEST_CASE("binary draws round trip") {
  Eigen::MatrixXd d(3, 4);
  d << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, -1e-300;
  std::stringstream buf;
  write_draws_binary(d, buf);
  CHECK(buf.str().size() == 12 * 8);
  // Row-major: the second value on disk is row 0, column 1.
  double second = 0.0;
  std::memcpy(&second, buf.str().data() + 8, 8);
  CHECK(second == 2.0);
  CHECK(read_draws_binary(buf, 3, 4) == d);
}

namespace {

struct FittedToy {
  ModelData data;
  ChainRecord chain;
  ParentCovParams tmpl;
  ChainConfig cfg;
};

FittedToy fit_toy(double constant) {
  FittedToy t;
  t.data = tiny_data(40);
  if (constant != 0.0) t.data.z.setConstant(constant);
  t.tmpl = tiny_params(3.0);
  t.cfg = tiny_config(t.data, 1500, 500, 10, 21);
  if (constant != 0.0) t.cfg.noise_var = 1e-6;
  t.chain = run_chain(t.data, t.tmpl, {}, t.cfg);
  return t;
}

}  // namespace

TEST_CASE("posterior field on observed locations tracks the data") {
  const FittedToy t = fit_toy(0.0);
  const PredictionSet pset = PredictionSet::build(t.data.locs, t.data.x, t.data.locs);
  PredictOptions opt;
  opt.keep_every = 1;
  opt.seed = 3;
  const PosteriorField f = predict_field(t.chain, t.data, pset, t.tmpl, t.cfg.taper, t.cfg.noise_var, opt);
  CHECK((f.mean - t.data.z).cwiseAbs().mean() <= 3.0 * std::sqrt(t.cfg.noise_var));
  for (int i = 0; i < f.size(); ++i) {
    CHECK(f.lower(i) <= f.mean(i));
    CHECK(f.mean(i) <= f.upper(i));
    CHECK(f.sd(i) >= 0.0);
  }
  opt.threads = 3;
  const PosteriorField g = predict_field(t.chain, t.data, pset, t.tmpl, t.cfg.taper, t.cfg.noise_var, opt);
  CHECK(g.mean == f.mean);
  CHECK(g.upper == f.upper);
}

TEST_CASE("constant data are reproduced at the observed locations") {
  const FittedToy t = fit_toy(2.5);
  const PredictionSet pset = PredictionSet::build(t.data.locs, t.data.x, t.data.locs);
  PredictOptions opt;
  opt.keep_every = 2;
  const PosteriorField f = predict_field(t.chain, t.data, pset, t.tmpl, t.cfg.taper, t.cfg.noise_var, opt);
  for (int i = 0; i < f.size(); ++i) CHECK(std::abs(f.mean(i) - 2.5) <= 2.0 * f.sd(i) + 1e-6);
  CHECK_THROWS_AS(predict_field(ChainRecord{}, t.data, pset, t.tmpl, t.cfg.taper, 1e-6, opt), ConfigError);
}
