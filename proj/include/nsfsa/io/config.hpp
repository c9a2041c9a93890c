#ifndef NSFSA_IO_CONFIG_HPP
#define NSFSA_IO_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsfsa/common.hpp"
#include "nsfsa/fsa/knots.hpp"
#include "nsfsa/io/dataset.hpp"
#include "nsfsa/kernels/sv_params.hpp"
#include "nsfsa/predictor/predictor.hpp"
#include "nsfsa/sampler/sampler.hpp"

namespace nsfsa {

/// Flat `key = value` run configuration. Parsing is strict: unknown or
/// repeated keys and missing required keys are errors.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text, const std::string& source = "config");
  static RunConfig load(const std::string& path);
  /// Every known key with its description and default ("" = required or unset).
  static const std::vector<std::pair<std::string, std::string>>& known_keys();

  /// Apply `key=value`; same strictness as parsing.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  /// Value or the documented default.
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_long(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// Canonical text: every explicitly set key, sorted, one per line.
  std::string canonical() const;
  void validate() const;

  // Typed views.
  int dims() const;
  double noise_var() const;
  TaperSpec taper() const;
  Trend trend() const;
  bool has_header() const { return get_bool("has_header"); }
  std::uint64_t seed() const;
  std::string transform() const;
  double transform_shift() const { return get_double("transform_shift"); }

  SvBasis sv_basis() const;
  /// Priors; unset prior means fall back to data-driven values.
  ParentCovParams initial_params(const ModelData& data) const;
  KnotMode knot_mode() const;
  KnotSet initial_knots(const ProposalDomain& domain) const;
  ProposalDomain proposal_domain(const LocationList& locs) const;
  ChainConfig chain_config(const LocationList& locs) const;
  PredictOptions predict_options() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Parses "a b c; d e f" into points of dimension `dims`.
LocationList parse_points(const std::string& text, int dims, const std::string& key);

}  // namespace nsfsa

#endif  // NSFSA_IO_CONFIG_HPP
