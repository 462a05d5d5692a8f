#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "effective_trade/economy.hpp"
#include "effective_trade/exchange.hpp"

namespace effective_trade {

/// One flag per feasibility condition plus the worst violation behind it.
struct FeasibilityReport {
  bool simplex = true;
  bool budget = true;
  bool consumption = true;
  bool cross_caps = true;
  bool capacity = true;
  bool no_bidirectional = true;

  double worst_simplex = 0.0;
  double worst_budget = 0.0;
  double worst_consumption = 0.0;
  double worst_cross_cap = 0.0;
  double worst_capacity = 0.0;

  std::vector<double> budget_residuals;

  bool feasible() const {
    return simplex && budget && consumption && cross_caps && capacity &&
           no_bidirectional;
  }
};

/**
 * Checks a (prices, offers) state against every feasibility condition.
 *
 * Cross caps bind both ways (each side may not exceed the other), so they
 * hold exactly when the two sides of every link agree.
 */
inline FeasibilityReport feasibility_check(const Economy& economy,
                                           const PriceSystem& prices,
                                           const OfferTensor& offers,
                                           double tol = 1e-9) {
  check_shape(economy, prices);
  check_shape(economy, offers.seller);
  check_shape(economy, offers.buyer);
  FeasibilityReport r;
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;

  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double p : prices.row(i)) {
      sum += p;
      r.worst_simplex = std::max(r.worst_simplex, -p);
    }
    r.worst_simplex = std::max(r.worst_simplex, std::abs(sum - 1.0));
  }
  r.simplex = r.worst_simplex <= tol;

  const FlowTensor q = effective_flows(offers);
  r.budget_residuals = budget_residuals(prices, q);
  for (double b : r.budget_residuals) {
    r.worst_budget = std::max(r.worst_budget, std::abs(b));
  }
  r.budget = r.worst_budget <= tol;

  for (std::size_t i = 0; i < n; ++i) {
    GoodBundle x = holding(economy, q, i);
    const auto& set = economy.agents[i].consumption;
    for (std::size_t k = 0; k < L; ++k) {
      r.worst_consumption = std::max(
          {r.worst_consumption, set.lower_bound(k) - x[k],
           x[k] - set.upper_bound(k)});
    }
  }
  r.consumption = r.worst_consumption <= tol;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        continue;
      }
      for (std::size_t k = 0; k < L; ++k) {
        double s = offers.seller(i, j, k);
        double b = offers.buyer(i, j, k);
        r.worst_cross_cap = std::max(r.worst_cross_cap, std::abs(s - b));
        double cap = economy.capacity(i, j, k);
        r.worst_capacity =
            std::max({r.worst_capacity, s - cap, b - cap});
      }
    }
  }
  r.cross_caps = r.worst_cross_cap <= tol;
  r.capacity = r.worst_capacity <= tol;
  r.no_bidirectional = !has_bidirectional_flow(q, tol);
  return r;
}

}  // namespace effective_trade
