#ifndef NSFSA_PREDICTOR_PREDICTOR_HPP
#define NSFSA_PREDICTOR_PREDICTOR_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "nsfsa/common.hpp"
#include "nsfsa/fsa/data_cov.hpp"
#include "nsfsa/fsa/sparse_sym.hpp"
#include "nsfsa/sampler/chain_record.hpp"
#include "nsfsa/sampler/rng.hpp"
#include "nsfsa/sampler/sampler.hpp"

namespace nsfsa {

/// Prediction locations with their covariates. overlap[i] is the index of the
/// observed location equal to locations[i] (within tolerance), or -1.
struct PredictionSet {
  LocationList locations;
  Eigen::MatrixXd x;
  std::vector<int> overlap;

  static PredictionSet build(LocationList locations, Eigen::MatrixXd x, const LocationList& observed,
                             double tol = 1e-12);
  int size() const { return static_cast<int>(locations.size()); }
};

struct EtaMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Posterior of the basis coefficients given resid = Z - X beta.
EtaMoments eta_moments(const DataCovOps& ops, const Eigen::VectorXd& resid);
Eigen::VectorXd sample_eta(const DataCovOps& ops, const Eigen::VectorXd& resid, Rng& rng);

/// Conditional simulation of the tapered remainder delta at prediction
/// locations. The joint pattern over observed plus new locations is analysed
/// once and reused for every draw.
class DeltaSimulator {
 public:
  DeltaSimulator(std::shared_ptr<const FitGeometry> geometry, const PredictionSet& pset);

  Eigen::VectorXd draw(const DataCovOps& ops, const Eigen::VectorXd& eta, const Eigen::VectorXd& resid,
                       Rng& rng) const;
  /// V_delta over the joint set (observed first, then non-overlapping
  /// prediction locations), unfactorized values for the given state.
  SparseSymMatrix joint_cov(const DataCovOps& ops) const;
  /// Position of each prediction location in the joint set.
  const std::vector<int>& joint_index() const { return joint_index_; }
  const LocationList& joint_locations() const { return joint_locs_; }

 private:
  std::shared_ptr<const FitGeometry> geometry_;
  LocationList joint_locs_;
  std::vector<int> joint_index_;
  std::shared_ptr<const SparsePattern> pattern_;
  std::vector<double> pair_taper_;
};

Eigen::VectorXd conditional_sim_delta(const DataCovOps& ops, const Eigen::VectorXd& eta,
                                      const Eigen::VectorXd& resid, const PredictionSet& pset, Rng& rng);

/// Basis rows b(s)' at arbitrary locations for the state held by `ops`.
Eigen::MatrixXd basis_at(const DataCovOps& ops, const LocationList& locs);

struct PredictOptions {
  long keep_every = 10;
  double level = 0.95;
  /// Add measurement error, giving draws of Z instead of Y.
  bool add_noise = false;
  bool keep_draws = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct PosteriorField {
  LocationList locations;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double level = 0.95;
  /// Optional n_P x draws matrix.
  Eigen::MatrixXd draws;

  int size() const { return static_cast<int>(locations.size()); }
  void write_csv(std::ostream& out) const;
};

/// Pointwise mean, sd and equal-tailed interval of the columns of `draws`.
PosteriorField summarize_draws(const LocationList& locs, const Eigen::MatrixXd& draws, double level);

/// Empirical quantile (linear interpolation between order statistics).
double quantile_sorted(const std::vector<double>& sorted, double prob);

PosteriorField predict_field(const ChainRecord& chain, const ModelData& data, const PredictionSet& pset,
                             const ParentCovParams& tmpl, const TaperSpec& taper, double noise_var,
                             const PredictOptions& options);

/// Little-endian float64, row = location, column = draw (row-major).
void write_draws_binary(const Eigen::MatrixXd& draws, std::ostream& out);
Eigen::MatrixXd read_draws_binary(std::istream& in, Eigen::Index rows, Eigen::Index cols);

}  // namespace nsfsa

#endif  // NSFSA_PREDICTOR_PREDICTOR_HPP
