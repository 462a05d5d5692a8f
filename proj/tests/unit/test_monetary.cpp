#include <gtest/gtest.h>

#include "effective_trade/effective_trade.hpp"
#include "oracles.hpp"

using namespace effective_trade;

namespace {

FlowTensor circular_trade() {
  FlowTensor q(3, 2);
  q(0, 2, 0) = 2;
  q(2, 0, 1) = 2;
  q(1, 2, 0) = 1;
  q(2, 1, 1) = 1;
  return q;
}

}  // namespace

TEST(Monetary, PaymentsMatchGoodsValue) {
  PriceSystem p(3, 2);
  auto q = circular_trade();
  auto ledger = build_ledger({1, 1, 1}, p, q);
  // Money travels against goods: a pays c for the good 2 it receives.
  EXPECT_DOUBLE_EQ(ledger.paid(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(ledger.paid(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(ledger.received(2, 0), ledger.paid(0, 2));
  for (double r : local_net_audit(ledger, p, q)) EXPECT_LE(std::abs(r), 1e-12);
  EXPECT_EQ(conservation_audit(ledger), 0.0);
  double total = 0;
  for (double b : ledger.balances) total += b;
  EXPECT_DOUBLE_EQ(total, 3.0);
}

TEST(Monetary, QuantityEquationAndAutarkyVelocity) {
  PriceSystem p(3, 2);
  auto q = circular_trade();
  auto ledger = build_ledger({1, 1, 1}, p, q);
  auto qe = quantity_equation(p, q, ledger);
  EXPECT_TRUE(qe.holds);
  EXPECT_NEAR(qe.left, qe.right, 1e-12);
  EXPECT_NEAR(qe.velocity, 3.0 / 3.0, 1e-12);

  auto idle = build_ledger({1, 1, 1}, p, FlowTensor(3, 2));
  EXPECT_EQ(quantity_equation(p, FlowTensor(3, 2), idle).velocity, 0.0);
}

TEST(Monetary, ZeroStockWithTradeIsRejected) {
  PriceSystem p(3, 2);
  auto q = circular_trade();
  auto ledger = build_ledger({0, 0, 0}, p, q);
  EXPECT_THROW(quantity_equation(p, q, ledger), ContractViolation);
  EXPECT_THROW(build_ledger({-1, 0, 0}, p, q), ContractViolation);
}

TEST(Monetary, TamperedLedgerFailsAudits) {
  PriceSystem p(3, 2);
  auto q = circular_trade();
  auto ledger = build_ledger({1, 1, 1}, p, q);
  ledger.received(2, 0) += 0.25;
  EXPECT_NE(conservation_audit(ledger), 0.0);
  auto honest = build_ledger({1, 1, 1}, p, q);
  honest.paid(0, 2) += 0.25;
  EXPECT_GT(std::abs(local_net_audit(honest, p, q)[0]), 0.1);
}

TEST(Monetary, DoublingEndowmentsHalvesVelocity) {
  PriceSystem p(3, 2);
  auto q = circular_trade();
  auto base = build_ledger({1, 1, 1}, p, q);
  auto rich = build_ledger({2, 2, 2}, p, q);
  auto d = compare_ledgers(base, rich);
  EXPECT_NEAR(rich.velocity, base.velocity / 2, 1e-12);
  EXPECT_NEAR(d.velocity, -base.velocity / 2, 1e-12);
  for (double b : d.balances) EXPECT_NEAR(b, 1.0, 1e-12);
  for (double r : money_balance_identity(base, p, q)) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(Monetary, AuditsHoldOverTheNashSet) {
  const auto e = oracle::three_agent_economy();
  auto nash = nash_set(e, enumerate_feasible(e));
  ASSERT_FALSE(nash.empty());
  for (const auto& r : nash) {
    auto ledger = build_ledger({1, 1, 1}, r.witness, r.flows);
    for (double x : local_net_audit(ledger, r.witness, r.flows)) EXPECT_LE(std::abs(x), 1e-9);
    EXPECT_EQ(conservation_audit(ledger), 0.0);
    auto qe = quantity_equation(r.witness, r.flows, ledger);
    EXPECT_NEAR(qe.left, qe.right, 1e-9);
  }
}
