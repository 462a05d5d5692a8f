#pragma once

#include <vector>

#include "effective_trade/dynamics/state.hpp"
#include "effective_trade/utility.hpp"

namespace effective_trade {

struct WelfareDirection {
  /// Always zero: U does not depend on prices directly.
  PriceSystem prices;
  OfferTensor offers;
  /// Some component used a capped one-sided derivative.
  bool boundary = false;
};

/**
 * Derivative of (weighted) welfare with respect to every offer entry.
 * Agent i's sell offer x^i_ij,k gets -du^i/dx_k; its buy offer x^i_ji,k
 * (stored as buyer(j, i, k)) gets +du^i/dx_k.
 */
inline WelfareDirection welfare_supergradient(
    const Economy& economy, const AscentState& state,
    const std::vector<double>& weights = {}) {
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;
  WelfareDirection d;
  d.prices = PriceSystem(n, L);
  for (double& p : d.prices.data()) {
    p = 0.0;
  }
  d.offers = OfferTensor(n, L);
  for (std::size_t i = 0; i < n; ++i) {
    GoodBundle x = offer_holding(economy, state.offers, i);
    clamp_rounding(x);
    auto g = utility_gradient(economy.agents[i].utility, x);
    d.boundary = d.boundary || g.boundary;
    double w = weights.empty() ? 1.0 : weights[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      for (std::size_t k = 0; k < L; ++k) {
        d.offers.seller(i, j, k) = -w * g.values[k];
        d.offers.buyer(j, i, k) = w * g.values[k];
      }
    }
  }
  return d;
}

}  // namespace effective_trade
