#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

namespace effective_trade::numeric {

/**
 * Euclidean projection of v onto the unit simplex {x >= 0, sum x = 1}.
 *
 * Sort-and-threshold method: O(n log n).
 */
inline std::vector<double> project_to_simplex(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>{});

  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) {
      theta = candidate;
    }
  }

  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = std::max(v[k] - theta, 0.0);
  }
  return out;
}

}  // namespace effective_trade::numeric
