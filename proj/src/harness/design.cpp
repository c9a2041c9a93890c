#include "nsfsa/harness/design.hpp"

#include <algorithm>

namespace nsfsa {

const char* group_name(LocGroup g) {
  switch (g) {
    case LocGroup::all:
      return "ALL";
    case LocGroup::obs:
      return "OBS";
    case LocGroup::mar:
      return "MAR";
    case LocGroup::mbd:
      return "MBD";
  }
  return "?";
}

const std::vector<int>& StudyDesign::group(LocGroup g) const {
  switch (g) {
    case LocGroup::obs:
      return obs;
    case LocGroup::mar:
      return mar;
    case LocGroup::mbd:
      return mbd;
    case LocGroup::all:
      break;
  }
  return all;
}

LocationList StudyDesign::locations(const std::vector<int>& idx) const {
  LocationList out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(grid[i]);
  return out;
}

StudyDesign make_design(const DesignSpec& spec, Rng& rng) {
  if (spec.n_grid < 1 || spec.block_length < 0 || spec.mar_divisor < 1) throw ConfigError("invalid study design");
  StudyDesign d;
  for (int s = 1; s <= spec.n_grid; ++s) {
    d.grid.push_back(make_location({static_cast<double>(s)}));
    d.all.push_back(s - 1);
  }
  std::vector<char> in_block(spec.n_grid, 0);
  for (int start : spec.block_starts) {
    for (int s = start; s < start + spec.block_length; ++s) {
      if (s < 1 || s > spec.n_grid) throw ConfigError("design block outside the grid");
      in_block[s - 1] = 1;
    }
  }
  std::vector<int> rest;
  for (int i = 0; i < spec.n_grid; ++i) {
    if (in_block[i]) {
      d.mbd.push_back(i);
    } else {
      rest.push_back(i);
    }
  }
  const int n_mar = static_cast<int>(rest.size()) / spec.mar_divisor;
  // Partial Fisher-Yates shuffle.
  for (int k = 0; k < n_mar; ++k) {
    const int j = k + rng.index(static_cast<int>(rest.size()) - k);
    std::swap(rest[k], rest[j]);
  }
  d.mar.assign(rest.begin(), rest.begin() + n_mar);
  d.obs.assign(rest.begin() + n_mar, rest.end());
  std::sort(d.mar.begin(), d.mar.end());
  std::sort(d.obs.begin(), d.obs.end());
  return d;
}

}  // namespace nsfsa
