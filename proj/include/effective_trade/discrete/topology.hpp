#pragma once

#include "effective_trade/economy.hpp"
#include "effective_trade/error.hpp"

namespace effective_trade {

/// Copy of the economy with the given shipment capacities installed.
inline Economy apply_topology(const Economy& economy,
                              const CapacityTensor& capacities) {
  if (capacities.agents() != economy.size() ||
      capacities.goods() != economy.goods) {
    throw ContractViolation("apply_topology: capacity shape mismatch");
  }
  for (double c : capacities.data()) {
    if (!(c >= 0.0)) {
      throw ContractViolation("apply_topology: negative capacity");
    }
  }
  Economy out = economy;
  out.capacities = capacities;
  return out;
}

/// Capacities that bar all trade between a and b, both directions, every good.
inline CapacityTensor bar_link(CapacityTensor capacities, std::size_t a,
                               std::size_t b) {
  for (std::size_t k = 0; k < capacities.goods(); ++k) {
    capacities(a, b, k) = 0.0;
    capacities(b, a, k) = 0.0;
  }
  return capacities;
}

}  // namespace effective_trade
