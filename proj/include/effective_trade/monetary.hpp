#pragma once

#include <cmath>
#include <vector>

#include "effective_trade/economy.hpp"
#include "effective_trade/error.hpp"
#include "effective_trade/exchange.hpp"

namespace effective_trade {

/// Square matrix indexed (payer, payee).
class MoneyMatrix {
 public:
  MoneyMatrix() = default;
  explicit MoneyMatrix(std::size_t agents)
      : n_(agents), data_(agents * agents, 0.0) {}

  std::size_t agents() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }
  bool operator==(const MoneyMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/**
 * Double-entry money ledger. paid(i, j) is i's record of money sent to j,
 * received(j, i) is j's record of money received from i; a consistent
 * ledger has the two equal.
 */
struct MoneyLedger {
  std::vector<double> endowments;
  MoneyMatrix paid;
  MoneyMatrix received;
  std::vector<double> balances;
  double total = 0.0;
  double velocity = 0.0;
};

/// Buyer pays: for goods shipped j -> i, i pays j the value p^j . q_ji.
inline MoneyMatrix derive_money_flows(const PriceSystem& prices,
                                      const FlowTensor& flows) {
  const std::size_t n = flows.agents();
  MoneyMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double v = 0.0;
      for (std::size_t k = 0; k < flows.goods(); ++k) {
        v += prices(j, k) * flows(j, i, k);
      }
      m(i, j) = v;
    }
  }
  return m;
}

inline void recompute_balances(MoneyLedger& ledger) {
  const std::size_t n = ledger.endowments.size();
  ledger.balances = ledger.endowments;
  double flow = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      ledger.balances[i] -= ledger.paid(i, j);
      ledger.balances[i] += ledger.received(i, j);
      flow += ledger.paid(i, j);
    }
  }
  ledger.total = 0.0;
  for (double m : ledger.endowments) {
    ledger.total += m;
  }
  ledger.velocity = ledger.total > 0.0 ? flow / ledger.total : 0.0;
}

inline MoneyLedger build_ledger(const std::vector<double>& endowments,
                                const PriceSystem& prices,
                                const FlowTensor& flows) {
  if (endowments.size() != flows.agents()) {
    throw ContractViolation("build_ledger: one money endowment per agent");
  }
  for (double m : endowments) {
    if (!(m >= 0.0)) {
      throw ContractViolation("build_ledger: negative money endowment");
    }
  }
  MoneyLedger ledger;
  ledger.endowments = endowments;
  ledger.paid = derive_money_flows(prices, flows);
  ledger.received = MoneyMatrix(flows.agents());
  for (std::size_t i = 0; i < flows.agents(); ++i) {
    for (std::size_t j = 0; j < flows.agents(); ++j) {
      ledger.received(j, i) = ledger.paid(i, j);
    }
  }
  recompute_balances(ledger);
  return ledger;
}

/**
 * Per agent: value of goods received minus value shipped, minus the net
 * money paid out (as recorded by the payers).
 */
inline std::vector<double> local_net_audit(const MoneyLedger& ledger,
                                           const PriceSystem& prices,
                                           const FlowTensor& flows) {
  const std::size_t n = flows.agents();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double net_money = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      net_money += ledger.paid(i, j) - ledger.paid(j, i);
    }
    out[i] = budget_residual(prices, flows, i) - net_money;
  }
  return out;
}

/**
 * Sum of balances minus sum of endowments, accumulated one transfer at a
 * time so that a consistent ledger gives exactly zero.
 */
inline double conservation_audit(const MoneyLedger& ledger) {
  const std::size_t n = ledger.endowments.size();
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) {
        residual += ledger.received(j, i) - ledger.paid(i, j);
      }
    }
  }
  return residual;
}

struct QuantityEquation {
  double left = 0.0;
  double right = 0.0;
  double velocity = 0.0;
  bool holds = true;
};

/// p.X.1 against M v, with v the total money flow over the money stock.
inline QuantityEquation quantity_equation(const PriceSystem& prices,
                                          const FlowTensor& flows,
                                          const MoneyLedger& ledger,
                                          double tol = 1e-9) {
  const std::size_t n = flows.agents();
  QuantityEquation q;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < flows.goods(); ++k) {
        q.left += prices(j, k) * flows(j, i, k);
      }
    }
  }
  double flow = 0.0;
  double stock = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stock += ledger.endowments[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) flow += ledger.paid(i, j);
    }
  }
  if (stock <= 0.0) {
    if (flow > 0.0 || q.left > 0.0) {
      throw ContractViolation(
          "quantity_equation: velocity undefined with zero money stock");
    }
    return q;
  }
  q.velocity = flow / stock;
  q.right = stock * q.velocity;
  q.holds = std::abs(q.left - q.right) <= tol;
  return q;
}

/// Goods and money in minus goods and money out, per agent.
inline std::vector<double> money_balance_identity(const MoneyLedger& ledger,
                                                  const PriceSystem& prices,
                                                  const FlowTensor& flows) {
  const std::size_t n = flows.agents();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < flows.goods(); ++k) {
        lhs += prices(j, k) * flows(j, i, k);
        rhs += prices(i, k) * flows(i, j, k);
      }
      lhs += ledger.received(i, j);
      rhs += ledger.paid(i, j);
    }
    out[i] = lhs - rhs;
  }
  return out;
}

struct MoneyScenarioDelta {
  std::vector<double> balances;
  double velocity = 0.0;
};

/// Differences between two ledgers (perturbed minus base).
inline MoneyScenarioDelta compare_ledgers(const MoneyLedger& base,
                                          const MoneyLedger& perturbed) {
  MoneyScenarioDelta d;
  d.balances.resize(base.balances.size());
  for (std::size_t i = 0; i < base.balances.size(); ++i) {
    d.balances[i] = perturbed.balances[i] - base.balances[i];
  }
  d.velocity = perturbed.velocity - base.velocity;
  return d;
}

}  // namespace effective_trade
