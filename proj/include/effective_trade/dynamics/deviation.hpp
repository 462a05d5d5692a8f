#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "effective_trade/discrete/nash.hpp"
#include "effective_trade/economy.hpp"
#include "effective_trade/exchange.hpp"
#include "effective_trade/utility.hpp"

namespace effective_trade {

struct ContinuousDeviationOptions {
  /// Random fractional sub-flows tried per agent, on top of the vertices.
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
  /// How far from exact balance the deviator's budget may be.
  double budget_tolerance = 1e-9;
  double gain_tolerance = 1e-9;
};

/**
 * Searches for a unilateral deviation at fixed prices of the others: the
 * deviator scales back any of its trades (each entry in [0, q]) and picks a
 * price row balancing its budget. Every all-or-nothing combination is tried,
 * then random fractional ones.
 */
inline std::optional<DeviationCertificate> find_continuous_deviation(
    const Economy& economy, const PriceSystem& prices, const FlowTensor& flows,
    const ContinuousDeviationOptions& options = {}) {
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::optional<DeviationCertificate> best;
  for (std::size_t i = 0; i < n; ++i) {
    struct Entry {
      std::size_t from, to, good;
      double top;
    };
    std::vector<Entry> entries;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < L; ++k) {
        if (flows(i, j, k) > 0) entries.push_back({i, j, k, flows(i, j, k)});
        if (flows(j, i, k) > 0) entries.push_back({j, i, k, flows(j, i, k)});
      }
    }
    if (entries.empty()) continue;

    GoodBundle base_x = holding(economy, flows, i);
    for (double& v : base_x) v = std::max(v, 0.0);
    const double base = evaluate_utility(economy.agents[i].utility, base_x);

    auto evaluate = [&](const FlowTensor& d) {
      GoodBundle x = holding(economy, d, i);
      for (double v : x) {
        if (v < -1e-12) return;
      }
      for (double& v : x) v = std::max(v, 0.0);
      if (!economy.agents[i].consumption.contains(x)) return;
      double gain = evaluate_utility(economy.agents[i].utility, x) - base;
      if (gain <= options.gain_tolerance) return;

      double received = 0.0;
      std::vector<double> shipped(L, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        for (std::size_t k = 0; k < L; ++k) {
          received += prices(j, k) * d(j, i, k);
          shipped[k] += d(i, j, k);
        }
      }
      double lo = *std::min_element(shipped.begin(), shipped.end());
      double hi = *std::max_element(shipped.begin(), shipped.end());
      if (received < lo - options.budget_tolerance ||
          received > hi + options.budget_tolerance) {
        return;
      }
      if (best && best->utility_gain >= gain) return;

      detail::Slab s;
      s.lo = lo;
      s.hi = hi;
      s.shipped = shipped;
      DeviationCertificate c;
      c.agent = i;
      c.flows = d;
      c.price_row = detail::balancing_row(s, received);
      c.utility_gain = gain;
      best = std::move(c);
    };

    FlowTensor d = flows;
    const std::size_t m = entries.size();
    if (m <= 16) {
      for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        for (std::size_t e = 0; e < m; ++e) {
          d(entries[e].from, entries[e].to, entries[e].good) =
              (mask >> e) & 1U ? entries[e].top : 0.0;
        }
        evaluate(d);
      }
    }
    for (std::size_t s = 0; s < options.samples; ++s) {
      for (const auto& e : entries) {
        d(e.from, e.to, e.good) = e.top * unit(rng);
      }
      evaluate(d);
    }
  }
  return best;
}

}  // namespace effective_trade
