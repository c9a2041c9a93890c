#ifndef NSFSA_SAMPLER_CHAIN_RECORD_HPP
#define NSFSA_SAMPLER_CHAIN_RECORD_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nsfsa/common.hpp"
#include "nsfsa/fsa/knots.hpp"
#include "nsfsa/kernels/sv_params.hpp"

namespace nsfsa {

enum class MoveType { none, add, remove, move };

const char* move_name(MoveType m);
MoveType parse_move(const std::string& name);

/// One kept iteration.
struct ChainRow {
  long iter = 0;
  Eigen::VectorXd beta;
  /// One offset per SV field, in field order.
  Eigen::VectorXd offsets;
  /// Coefficient vectors of the non-stationary fields, concatenated.
  Eigen::VectorXd coeffs;
  double loglik = 0.0;
  MoveType move = MoveType::none;
  bool accepted = false;
  bool theta_accepted = false;
  KnotSet knots;

  int r() const { return knots.size(); }
};

/// Thinned post-burn-in draws plus the column layout needed to read them back.
struct ChainRecord {
  int dim = 1;
  std::vector<std::string> beta_names;
  std::vector<std::string> offset_names;
  std::vector<std::string> coeff_names;
  std::vector<ChainRow> rows;

  /// Column layout for a parameter template with p regression coefficients.
  static ChainRecord with_layout(const ParentCovParams& tmpl, int p);

  void append(ChainRow row) { rows.push_back(std::move(row)); }
  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  double mean_r() const;

  void write_csv(std::ostream& out) const;
  static ChainRecord read_csv(std::istream& in, int dim);
};

/// Split a parameter bundle into row offsets/coefficients.
void store_params(const ParentCovParams& params, ChainRow& row);
/// Rebuild the parameter bundle of a row on top of a template with the same layout.
ParentCovParams params_from_row(const ParentCovParams& tmpl, const ChainRow& row);

/// Names of the SV fields for spatial dimension d, in field order.
std::vector<std::string> sv_field_names(int dim);

}  // namespace nsfsa

#endif  // NSFSA_SAMPLER_CHAIN_RECORD_HPP
