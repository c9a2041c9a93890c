#ifndef NSFSA_IO_DATASET_HPP
#define NSFSA_IO_DATASET_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

#include "nsfsa/common.hpp"
#include "nsfsa/sampler/sampler.hpp"

namespace nsfsa {

/// A CSV table of d coordinates, a value column and optional extra columns.
struct Dataset {
  int dims = 1;
  LocationList locs;
  Eigen::VectorXd z;
  /// Extra columns after z (covariates); may have zero columns.
  Eigen::MatrixXd extra;
  std::vector<std::string> extra_names;
  /// Rows whose coordinates repeat an earlier row exactly.
  int duplicate_locations = 0;

  int size() const { return static_cast<int>(locs.size()); }
};

/// Reads `path`. Columns: d coordinates, z, then optional covariates. With
/// `value_column` false the file holds coordinates (and covariates) only.
Dataset ingest_csv(const std::string& path, int dims, bool has_header, bool value_column = true);
Dataset parse_csv(const std::string& text, int dims, bool has_header, bool value_column = true,
                  const std::string& source = "input");

enum class Trend { intercept, coords };
Trend parse_trend(const std::string& name);

/// Mean of the coordinates; coordinate trend columns are centered on it.
Location coordinate_center(const LocationList& locs);

/// Columns: 1, optionally (s - center)', then the dataset's covariates.
Eigen::MatrixXd design_matrix(const LocationList& locs, const Eigen::MatrixXd& extra, Trend trend,
                              const Location& center);

}  // namespace nsfsa

#endif  // NSFSA_IO_DATASET_HPP
