#include "nsfsa/fsa/neighbors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>

namespace nsfsa {

std::vector<IndexPair> neighbor_pairs(const LocationList& locs, double length) {
  if (!(length > 0.0)) throw DomainError("neighbor_pairs: length must be positive");
  const int n = static_cast<int>(locs.size());
  std::vector<IndexPair> out;
  if (n == 0) return out;
  const Eigen::Index d = locs.front().size();

  if (!std::isfinite(length)) {
    out.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out.push_back({i, j});
    return out;
  }

  Location lo = locs.front();
  for (const auto& s : locs) {
    if (s.size() != d) throw DomainError("neighbor_pairs: mixed dimensions");
    lo = lo.cwiseMin(s);
  }
  using Cell = std::array<std::int64_t, kMaxDim>;
  auto cell_of = [&](const Location& s) {
    Cell c{0, 0, 0};
    for (Eigen::Index k = 0; k < d; ++k) {
      c[k] = static_cast<std::int64_t>(std::floor((s(k) - lo(k)) / length));
    }
    return c;
  };
  std::map<Cell, std::vector<int>> grid;
  std::vector<Cell> cells(n);
  for (int i = 0; i < n; ++i) {
    cells[i] = cell_of(locs[i]);
    grid[cells[i]].push_back(i);
  }

  const double len2 = length * length;
  const int span_y = d >= 2 ? 1 : 0;
  const int span_z = d >= 3 ? 1 : 0;
  for (int i = 0; i < n; ++i) {
    const Cell& c = cells[i];
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -span_y; dy <= span_y; ++dy) {
        for (int dz = -span_z; dz <= span_z; ++dz) {
          const Cell nb{c[0] + dx, c[1] + dy, c[2] + dz};
          auto it = grid.find(nb);
          if (it == grid.end()) continue;
          for (int j : it->second) {
            if (j < i) continue;
            const double dist2 = (locs[i] - locs[j]).squaredNorm();
            if (dist2 < len2) out.push_back({i, j});
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const IndexPair& a, const IndexPair& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  return out;
}

}  // namespace nsfsa
