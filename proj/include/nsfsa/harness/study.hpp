#ifndef NSFSA_HARNESS_STUDY_HPP
#define NSFSA_HARNESS_STUDY_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nsfsa/fsa/knots.hpp"
#include "nsfsa/harness/design.hpp"
#include "nsfsa/kernels/sv_params.hpp"
#include "nsfsa/sampler/sampler.hpp"

namespace nsfsa {

enum class StudyKind { sim1, sim2, sim3 };
StudyKind parse_study_kind(const std::string& name);
const char* study_name(StudyKind kind);

enum class KnotVariant { random, fixed8, fixed14 };

struct Variant {
  KnotVariant knots = KnotVariant::random;
  bool npc = true;

  /// e.g. "random-NPC", "fixed14-SPC".
  std::string name() const;
  static Variant parse(const std::string& name);
  int code() const { return 2 * static_cast<int>(knots) + (npc ? 0 : 1); }
};

/// Random, 8 fixed and 14 fixed knots, each with NPC and SPC.
std::vector<Variant> standard_variants();

struct StudySettings {
  StudyKind kind = StudyKind::sim1;
  std::vector<Variant> variants = standard_variants();
  int replicates = 10;
  std::uint64_t seed = 1;
  long n_iter = 10000;
  long n_burn = 5000;
  long thin = 10;
  /// Prediction uses every keep_every-th kept draw.
  long keep_every = 1;
  double level = 0.95;
  double taper_length = 6.5;
  int threads = 1;
};

/// One simulated dataset: design, truth on the full grid, and noisy data on
/// the full grid (only the OBS entries are given to the model).
struct ReplicateData {
  StudyDesign design;
  Eigen::VectorXd truth;
  Eigen::VectorXd z;
  double noise_var = 0.0;
};

double study_noise_var(StudyKind kind);
ReplicateData make_replicate(StudyKind kind, std::uint64_t study_seed, int replicate);

SvBasis study_sv_basis();
/// Starting parameters with the study priors; SPC pins the coefficients at 0.
ParentCovParams study_params(StudyKind kind, bool npc);
KnotSet fixed_knots(KnotVariant variant);
ChainConfig study_chain_config(const StudySettings& settings, const Variant& variant, std::uint64_t seed,
                               double noise_var);

struct VariantResult {
  Variant variant;
  int replicate = 0;
  std::array<double, 4> mspe{};
  std::array<double, 4> is{};
  double coverage_all = 0.0;
  double mean_r = 0.0;
  double theta_accept = 0.0;
  double seconds = 0.0;
};

VariantResult run_replicate(const StudySettings& settings, const Variant& variant, const ReplicateData& data,
                            int replicate);

struct VariantSummary {
  Variant variant;
  std::array<double, 4> mspe{};
  std::array<double, 4> is{};
  double coverage_all = 0.0;
  double mean_r = 0.0;
  double theta_accept = 0.0;
  double seconds = 0.0;
};

struct ScoreTable {
  StudyKind kind = StudyKind::sim1;
  std::vector<Variant> variants;
  int replicates = 0;
  /// Ordered by variant, then replicate.
  std::vector<VariantResult> raw;

  VariantSummary summary(std::size_t variant_index) const;
  std::optional<VariantSummary> find(const std::string& variant_name) const;
  std::vector<VariantSummary> summaries() const;

  /// Replicate-averaged scores (timing excluded so the file is reproducible).
  void write_csv(std::ostream& out) const;
  /// Aligned text in the layout metric x variant, scores times 100.
  void write_text(std::ostream& out) const;
  void write_raw_csv(std::ostream& out) const;
  void write_timing_csv(std::ostream& out) const;
};

/// Runs every variant on every replicate; jobs are spread over
/// settings.threads workers and reduced in a fixed order.
ScoreTable run_study(const StudySettings& settings);

}  // namespace nsfsa

#endif  // NSFSA_HARNESS_STUDY_HPP
