#ifndef NSFSA_HARNESS_DESIGN_HPP
#define NSFSA_HARNESS_DESIGN_HPP

#include <array>
#include <string>
#include <vector>

#include "nsfsa/common.hpp"
#include "nsfsa/sampler/rng.hpp"

namespace nsfsa {

enum class LocGroup { all, obs, mar, mbd };
constexpr std::array<LocGroup, 4> kAllGroups{LocGroup::all, LocGroup::obs, LocGroup::mar, LocGroup::mbd};
const char* group_name(LocGroup g);

/// The 1-D study layout: grid 1..n_grid, fixed missing-by-design blocks and a
/// random missing-at-random subset of the rest. Index vectors are 0-based
/// positions into the grid, sorted.
struct StudyDesign {
  LocationList grid;
  std::vector<int> obs;
  std::vector<int> mar;
  std::vector<int> mbd;
  std::vector<int> all;

  const std::vector<int>& group(LocGroup g) const;
  LocationList locations(const std::vector<int>& idx) const;
};

struct DesignSpec {
  int n_grid = 512;
  std::vector<int> block_starts{70, 198, 326, 454};
  int block_length = 25;
  /// Fraction of the non-block locations held out at random.
  int mar_divisor = 3;
};

/// Draws the MAR subset with `rng`; blocks are fixed.
StudyDesign make_design(const DesignSpec& spec, Rng& rng);

}  // namespace nsfsa

#endif  // NSFSA_HARNESS_DESIGN_HPP
