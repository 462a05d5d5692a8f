#pragma once

#include <vector>

#include "effective_trade/discrete/record.hpp"

namespace effective_trade {

inline constexpr double kDominanceTolerance = 1e-12;

/// a weakly beats b everywhere and strictly somewhere.
inline bool dominates(const std::vector<double>& a, const std::vector<double>& b,
                      double tol = kDominanceTolerance) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - tol) {
      return false;
    }
    if (a[i] > b[i] + tol) {
      strict = true;
    }
  }
  return strict;
}

/// Indices of the undominated utility vectors, in input order.
inline std::vector<std::size_t> pareto_indices(
    const std::vector<std::vector<double>>& profiles,
    double tol = kDominanceTolerance) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < profiles.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < profiles.size() && !dominated; ++b) {
      dominated = b != a && dominates(profiles[b], profiles[a], tol);
    }
    if (!dominated) {
      out.push_back(a);
    }
  }
  return out;
}

/// Sets the pareto flag on every record (relative to this list).
inline void mark_pareto(std::vector<EquilibriumRecord>& records) {
  std::vector<std::vector<double>> profiles;
  profiles.reserve(records.size());
  for (const auto& r : records) {
    profiles.push_back(r.utilities);
  }
  for (auto& r : records) {
    r.flags.pareto = false;
  }
  for (std::size_t i : pareto_indices(profiles)) {
    records[i].flags.pareto = true;
  }
}

inline std::vector<EquilibriumRecord> pareto_filter(
    std::vector<EquilibriumRecord> records) {
  mark_pareto(records);
  std::vector<EquilibriumRecord> out;
  for (auto& r : records) {
    if (r.flags.pareto) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace effective_trade
