#pragma once

#include <cmath>
#include <vector>

#include "effective_trade/economy.hpp"

namespace effective_trade {

enum class PriceRegime { higher, lower, equal };

struct PartnerRegime {
  std::size_t partner = 0;
  PriceRegime regime = PriceRegime::equal;
  bool compliant = true;
};

struct RegimeReport {
  /// Partners whose price for the good is above, below, or equal to i's.
  std::vector<std::size_t> higher;
  std::vector<std::size_t> lower;
  std::vector<std::size_t> equal;
  std::vector<PartnerRegime> partners;

  bool compliant() const {
    for (const auto& p : partners) {
      if (!p.compliant) return false;
    }
    return true;
  }
};

/**
 * Sorts i's partners by their price of good k relative to i's, then checks
 * the flow pattern allowed at a Nash state: with unequal prices at most one
 * direction trades, and every link has matched offers.
 */
inline RegimeReport classify_price_regimes(const PriceSystem& prices,
                                           std::size_t agent, std::size_t good,
                                           const OfferTensor& offers,
                                           double tol = 1e-9) {
  RegimeReport report;
  const double own = prices(agent, good);
  for (std::size_t j = 0; j < prices.agents(); ++j) {
    if (j == agent) {
      continue;
    }
    PartnerRegime pr;
    pr.partner = j;
    double pj = prices(j, good);
    if (std::abs(pj - own) <= tol) {
      pr.regime = PriceRegime::equal;
      report.equal.push_back(j);
    } else if (pj > own) {
      pr.regime = PriceRegime::higher;
      report.higher.push_back(j);
    } else {
      pr.regime = PriceRegime::lower;
      report.lower.push_back(j);
    }

    double sell_i = offers.seller(agent, j, good);
    double sell_j = offers.buyer(agent, j, good);
    double buy_i = offers.buyer(j, agent, good);
    double buy_j = offers.seller(j, agent, good);
    bool sell_matched = std::abs(sell_i - sell_j) <= tol;
    bool buy_matched = std::abs(buy_i - buy_j) <= tol;
    bool sell_zero = sell_i <= tol && sell_j <= tol;
    bool buy_zero = buy_i <= tol && buy_j <= tol;

    if (pr.regime == PriceRegime::equal) {
      pr.compliant = sell_matched && buy_matched;
    } else {
      pr.compliant = (sell_zero && buy_matched) || (sell_matched && buy_zero);
    }
    report.partners.push_back(pr);
  }
  return report;
}

}  // namespace effective_trade
