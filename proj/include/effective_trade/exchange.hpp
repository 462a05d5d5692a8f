#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "effective_trade/economy.hpp"
#include "effective_trade/error.hpp"
#include "effective_trade/utility.hpp"

namespace effective_trade {

/// q_ij,k = min(seller offer, buyer offer).
inline FlowTensor effective_flows(const OfferTensor& offers) {
  const auto& s = offers.seller;
  const auto& b = offers.buyer;
  if (s.agents() != b.agents() || s.goods() != b.goods()) {
    throw ContractViolation("effective_flows: offer sides differ in shape");
  }
  FlowTensor q(s.agents(), s.goods());
  auto sd = s.data();
  auto bd = b.data();
  auto qd = q.data();
  for (std::size_t e = 0; e < qd.size(); ++e) {
    if (sd[e] < 0.0 || bd[e] < 0.0) {
      throw ContractViolation("effective_flows: negative offer");
    }
    qd[e] = std::min(sd[e], bd[e]);
  }
  for (std::size_t i = 0; i < q.agents(); ++i) {
    for (std::size_t k = 0; k < q.goods(); ++k) {
      q(i, i, k) = 0.0;
    }
  }
  return q;
}

inline void check_shape(const Economy& economy, const FlowTensor& flows) {
  if (flows.agents() != economy.size() || flows.goods() != economy.goods) {
    throw ContractViolation("flow tensor does not match the economy");
  }
}

inline void check_shape(const Economy& economy, const PriceSystem& prices) {
  if (prices.agents() != economy.size() || prices.goods() != economy.goods) {
    throw ContractViolation("price system does not match the economy");
  }
}

/// x^i = w^i + inflow - outflow for one agent.
inline GoodBundle holding(const Economy& economy, const FlowTensor& flows,
                          std::size_t agent) {
  GoodBundle x = economy.agents[agent].endowment;
  for (std::size_t j = 0; j < economy.size(); ++j) {
    if (j == agent) {
      continue;
    }
    for (std::size_t k = 0; k < economy.goods; ++k) {
      x[k] += flows(j, agent, k) - flows(agent, j, k);
    }
  }
  return x;
}

/// Final holdings of every agent. Negative entries are left in place; the
/// feasibility check is what reports them.
inline std::vector<GoodBundle> final_allocation(const Economy& economy,
                                                const FlowTensor& flows) {
  check_shape(economy, flows);
  std::vector<GoodBundle> out;
  out.reserve(economy.size());
  for (std::size_t i = 0; i < economy.size(); ++i) {
    out.push_back(holding(economy, flows, i));
  }
  return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += a[k] * b[k];
  }
  return s;
}

/**
 * Value received minus value shipped for one agent: incoming goods are
 * valued at the sender's prices, outgoing goods at the agent's own.
 */
inline double budget_residual(const PriceSystem& prices,
                              const FlowTensor& flows, std::size_t agent) {
  double value_in = 0.0;
  double value_out = 0.0;
  for (std::size_t j = 0; j < flows.agents(); ++j) {
    if (j == agent) {
      continue;
    }
    for (std::size_t k = 0; k < flows.goods(); ++k) {
      value_in += prices(j, k) * flows(j, agent, k);
      value_out += prices(agent, k) * flows(agent, j, k);
    }
  }
  return value_in - value_out;
}

inline std::vector<double> budget_residuals(const PriceSystem& prices,
                                            const FlowTensor& flows) {
  std::vector<double> out(flows.agents());
  for (std::size_t i = 0; i < flows.agents(); ++i) {
    out[i] = budget_residual(prices, flows, i);
  }
  return out;
}

/**
 * Multiplies every price row by lambda. The rows leave the simplex; budget
 * residuals scale by lambda, so their zero set is unchanged.
 */
inline PriceSystem scale_prices(const PriceSystem& prices, double lambda) {
  if (!(lambda > 0.0)) {
    throw ContractViolation("scale_prices: lambda must be positive");
  }
  PriceSystem out = prices;
  for (double& p : out.data()) {
    p *= lambda;
  }
  return out;
}

inline std::vector<double> utilities(const Economy& economy,
                                     const std::vector<GoodBundle>& allocation) {
  std::vector<double> out(economy.size());
  for (std::size_t i = 0; i < economy.size(); ++i) {
    out[i] = evaluate_utility(economy.agents[i].utility, allocation[i]);
  }
  return out;
}

/// Entries where goods travel both ways between the same pair.
inline bool has_bidirectional_flow(const FlowTensor& flows, double tol = 0.0) {
  for (std::size_t i = 0; i < flows.agents(); ++i) {
    for (std::size_t j = i + 1; j < flows.agents(); ++j) {
      for (std::size_t k = 0; k < flows.goods(); ++k) {
        if (flows(i, j, k) > tol && flows(j, i, k) > tol) {
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace effective_trade
