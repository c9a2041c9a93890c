#ifndef NSFSA_COMMON_HPP
#define NSFSA_COMMON_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nsfsa {

/// Spatial dimension is at most three.
constexpr int kMaxDim = 3;

/// A point in the spatial domain, d in {1,2,3}.
using Location = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using LocationList = std::vector<Location>;

/// Small d x d matrices (anisotropy, rotations).
using SmallMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Invalid argument to a mathematical function (e.g. non-positive Bessel order).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A factorization or other numerical step failed after all recovery attempts.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: configuration, data files, command-line arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Location make_location(std::initializer_list<double> coords) {
  Location s(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) s(i++) = c;
  return s;
}

}  // namespace nsfsa

#endif  // NSFSA_COMMON_HPP
