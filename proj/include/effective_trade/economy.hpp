#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "effective_trade/error.hpp"

namespace effective_trade {

/// Quantities of each good, indexed by good.
using GoodBundle = std::vector<double>;

enum class Mode { continuous, discrete };

/// u(x) = (sum_k alpha_k x_k^r)^(1/r).
struct CesUtility {
  std::vector<double> weights;
  double exponent = 1.0;
};

/// Arbitrary utility. The gradient is optional; without it, callers that
/// need one fall back to central differences.
struct CustomUtility {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  std::size_t goods = 0;
};

using UtilitySpec = std::variant<CesUtility, CustomUtility>;

/// Box consumption set. Missing upper bounds are +infinity.
struct ConsumptionSet {
  GoodBundle lower;
  GoodBundle upper;

  bool contains(std::span<const double> x, double tol = 1e-9) const {
    for (std::size_t k = 0; k < x.size(); ++k) {
      double lo = k < lower.size() ? lower[k] : 0.0;
      double hi = k < upper.size() ? upper[k]
                                   : std::numeric_limits<double>::infinity();
      if (x[k] < lo - tol || x[k] > hi + tol) {
        return false;
      }
    }
    return true;
  }

  double lower_bound(std::size_t k) const {
    return k < lower.size() ? lower[k] : 0.0;
  }
  double upper_bound(std::size_t k) const {
    return k < upper.size() ? upper[k]
                            : std::numeric_limits<double>::infinity();
  }
};

struct Agent {
  std::string name;
  GoodBundle endowment;
  UtilitySpec utility;
  ConsumptionSet consumption;
  /// Initial money holding. Only the monetary module reads it.
  double money = 0.0;
};

/**
 * Dense n x n x L array indexed (from, to, good). Diagonal entries exist but
 * are kept at zero by every routine in the library.
 */
class FlowTensor {
 public:
  FlowTensor() = default;
  FlowTensor(std::size_t agents, std::size_t goods, double fill = 0.0)
      : agents_(agents), goods_(goods), data_(agents * agents * goods, fill) {}

  std::size_t agents() const noexcept { return agents_; }
  std::size_t goods() const noexcept { return goods_; }

  double& operator()(std::size_t from, std::size_t to, std::size_t good) {
    return data_[(from * agents_ + to) * goods_ + good];
  }
  double operator()(std::size_t from, std::size_t to, std::size_t good) const {
    return data_[(from * agents_ + to) * goods_ + good];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const FlowTensor&) const = default;

 private:
  std::size_t agents_ = 0;
  std::size_t goods_ = 0;
  std::vector<double> data_;
};

/**
 * Shipment bounds c_ij,k on the flow from i to j of good k. +infinity means
 * unbounded, 0 bars the link.
 */
using CapacityTensor = FlowTensor;

inline CapacityTensor unbounded_capacities(std::size_t agents,
                                           std::size_t goods) {
  return CapacityTensor(agents, goods,
                        std::numeric_limits<double>::infinity());
}

/**
 * Quantity offers. seller(i, j, k) is what i offers to ship to j; buyer(i, j,
 * k) is what j offers to take from i. The effective flow is the smaller one.
 */
struct OfferTensor {
  FlowTensor seller;
  FlowTensor buyer;

  OfferTensor() = default;
  OfferTensor(std::size_t agents, std::size_t goods)
      : seller(agents, goods), buyer(agents, goods) {}

  /// Both sides offer exactly the given flows.
  static OfferTensor saturated(const FlowTensor& flows) {
    OfferTensor out;
    out.seller = flows;
    out.buyer = flows;
    return out;
  }

  bool operator==(const OfferTensor&) const = default;
};

/// One price row per agent; every row lies on the unit simplex.
class PriceSystem {
 public:
  PriceSystem() = default;
  PriceSystem(std::size_t agents, std::size_t goods)
      : agents_(agents),
        goods_(goods),
        data_(agents * goods, goods > 0 ? 1.0 / static_cast<double>(goods)
                                        : 0.0) {}

  static PriceSystem uniform(std::size_t agents, std::size_t goods) {
    return PriceSystem(agents, goods);
  }

  std::size_t agents() const noexcept { return agents_; }
  std::size_t goods() const noexcept { return goods_; }

  double& operator()(std::size_t agent, std::size_t good) {
    return data_[agent * goods_ + good];
  }
  double operator()(std::size_t agent, std::size_t good) const {
    return data_[agent * goods_ + good];
  }

  std::span<double> row(std::size_t agent) {
    return std::span<double>(data_).subspan(agent * goods_, goods_);
  }
  std::span<const double> row(std::size_t agent) const {
    return std::span<const double>(data_).subspan(agent * goods_, goods_);
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const PriceSystem&) const = default;

 private:
  std::size_t agents_ = 0;
  std::size_t goods_ = 0;
  std::vector<double> data_;
};

struct Economy {
  std::vector<Agent> agents;
  std::size_t goods = 0;
  Mode mode = Mode::continuous;
  std::optional<CapacityTensor> capacities;

  std::size_t size() const noexcept { return agents.size(); }

  double capacity(std::size_t from, std::size_t to, std::size_t good) const {
    if (!capacities) {
      return std::numeric_limits<double>::infinity();
    }
    return (*capacities)(from, to, good);
  }

  /// Throws ContractViolation if dimensions or endowments are inconsistent.
  void validate() const {
    if (agents.empty()) {
      throw ContractViolation("economy has no agents");
    }
    if (goods == 0) {
      throw ContractViolation("economy has no goods");
    }
    for (const auto& a : agents) {
      if (a.endowment.size() != goods) {
        throw ContractViolation("agent " + a.name +
                                ": endowment dimension mismatch");
      }
      for (double w : a.endowment) {
        if (!(w >= 0.0)) {
          throw ContractViolation("agent " + a.name +
                                  ": endowment must be non-negative");
        }
      }
      if (const auto* ces = std::get_if<CesUtility>(&a.utility)) {
        if (ces->weights.size() != goods) {
          throw ContractViolation("agent " + a.name +
                                  ": utility weight dimension mismatch");
        }
      }
    }
    if (capacities && (capacities->agents() != agents.size() ||
                       capacities->goods() != goods)) {
      throw ContractViolation("capacity tensor dimension mismatch");
    }
  }
};

/**
 * Ordered pairs in table order: every (i, j) with i < j lexicographically,
 * then the reversed pairs in the same order. For three agents this is
 * 12, 13, 23, 21, 31, 32.
 */
inline std::vector<std::pair<std::size_t, std::size_t>> pair_order(
    std::size_t agents) {
  std::vector<std::pair<std::size_t, std::size_t>> upper;
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t j = i + 1; j < agents; ++j) {
      upper.emplace_back(i, j);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> out = upper;
  for (auto [i, j] : upper) {
    out.emplace_back(j, i);
  }
  return out;
}

}  // namespace effective_trade
