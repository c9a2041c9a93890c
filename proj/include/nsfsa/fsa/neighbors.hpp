#ifndef NSFSA_FSA_NEIGHBORS_HPP
#define NSFSA_FSA_NEIGHBORS_HPP

#include <vector>

#include "nsfsa/common.hpp"

namespace nsfsa {

/// Unordered index pair with i <= j.
struct IndexPair {
  int i = 0;
  int j = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// All pairs (i, j), i <= j, with |s_i - s_j| < length, diagonal included.
/// Uses uniform grid binning with cell size `length`; an infinite length
/// yields every pair. Output is sorted by (i, j).
std::vector<IndexPair> neighbor_pairs(const LocationList& locs, double length);

}  // namespace nsfsa

#endif  // NSFSA_FSA_NEIGHBORS_HPP
