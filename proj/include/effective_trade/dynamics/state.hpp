#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "effective_trade/economy.hpp"
#include "effective_trade/exchange.hpp"
#include "effective_trade/utility.hpp"

namespace effective_trade {

struct AscentState {
  PriceSystem prices;
  OfferTensor offers;
  std::size_t t = 0;
  double step = 0.0;
  double welfare = 0.0;
};

/**
 * Holding implied by agent i's own offers: what it asks to receive minus
 * what it offers to ship. Equals the effective holding when offers are
 * saturated.
 */
inline GoodBundle offer_holding(const Economy& economy,
                                const OfferTensor& offers, std::size_t i) {
  GoodBundle x = economy.agents[i].endowment;
  for (std::size_t j = 0; j < economy.size(); ++j) {
    if (j == i) {
      continue;
    }
    for (std::size_t k = 0; k < economy.goods; ++k) {
      x[k] += offers.buyer(j, i, k) - offers.seller(i, j, k);
    }
  }
  return x;
}

/// Rounding can leave holdings a hair below zero after a projection.
inline void clamp_rounding(GoodBundle& x, double tol = 1e-9) {
  for (double& v : x) {
    if (v < 0.0 && v >= -tol) {
      v = 0.0;
    }
  }
}

inline std::vector<double> offer_utilities(const Economy& economy,
                                           const OfferTensor& offers) {
  std::vector<double> u(economy.size());
  for (std::size_t i = 0; i < economy.size(); ++i) {
    GoodBundle x = offer_holding(economy, offers, i);
    clamp_rounding(x);
    u[i] = evaluate_utility(economy.agents[i].utility, x);
  }
  return u;
}

/// U = sum of utilities, optionally weighted.
inline double welfare(const Economy& economy, const OfferTensor& offers,
                      const std::vector<double>& weights = {}) {
  auto u = offer_utilities(economy, offers);
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    total += (weights.empty() ? 1.0 : weights[i]) * u[i];
  }
  return total;
}

inline double distance(const FlowTensor& a, const FlowTensor& b) {
  double s = 0.0;
  for (std::size_t e = 0; e < a.data().size(); ++e) {
    double d = a.data()[e] - b.data()[e];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Economy with_endowments(Economy economy,
                               const std::vector<GoodBundle>& endowments) {
  for (std::size_t i = 0; i < economy.size(); ++i) {
    economy.agents[i].endowment = endowments[i];
  }
  return economy;
}

}  // namespace effective_trade
