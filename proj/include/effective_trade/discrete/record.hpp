#pragma once

#include <vector>

#include "effective_trade/economy.hpp"
#include "effective_trade/exchange.hpp"
#include "effective_trade/price_polytope.hpp"

namespace effective_trade {

/// Where a record's stored price witness came from.
enum class WitnessSource {
  /// Projection of the uniform prices onto the polytope.
  canonical,
  /// Found by the Nash search elsewhere in the polytope.
  nash_search,
};

struct RecordFlags {
  bool feasible = false;
  bool pareto = false;
  bool nash = false;
  bool nash_pareto = false;

  bool operator==(const RecordFlags&) const = default;
};

struct EquilibriumRecord {
  FlowTensor flows;
  PriceSystem witness;
  int polytope_dimension = 0;
  std::vector<GoodBundle> allocation;
  std::vector<double> utilities;
  RecordFlags flags;
  WitnessSource witness_source = WitnessSource::canonical;

  bool operator==(const EquilibriumRecord&) const = default;
};

inline EquilibriumRecord make_record(const Economy& economy, FlowTensor flows,
                                     const PriceWitness& witness) {
  EquilibriumRecord r;
  r.allocation = final_allocation(economy, flows);
  r.utilities = utilities(economy, r.allocation);
  r.flows = std::move(flows);
  r.witness = witness.prices;
  r.polytope_dimension = witness.dimension;
  r.flags.feasible = true;
  return r;
}

/// Flow entries flattened good by good in table pair order.
inline std::vector<double> flattened_flows(const FlowTensor& flows) {
  std::vector<double> out;
  const auto pairs = pair_order(flows.agents());
  out.reserve(pairs.size() * flows.goods());
  for (std::size_t k = 0; k < flows.goods(); ++k) {
    for (auto [i, j] : pairs) {
      out.push_back(flows(i, j, k));
    }
  }
  return out;
}

}  // namespace effective_trade
