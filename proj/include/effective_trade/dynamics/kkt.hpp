#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "effective_trade/dynamics/state.hpp"
#include "effective_trade/economy.hpp"
#include "effective_trade/exchange.hpp"
#include "effective_trade/numeric/nnls.hpp"
#include "effective_trade/utility.hpp"

namespace effective_trade {

/**
 * Multipliers of one agent's problem. mu and eta are indexed like flows:
 * (i, j, k) for the agent's sales to j, (j, i, k) for its purchases.
 */
struct KKTMultipliers {
  double lambda = 0.0;
  double kappa = 0.0;
  FlowTensor mu;
  FlowTensor eta;
  std::vector<double> theta;
  std::vector<double> nu;
};

/**
 * Agent `agent`'s view of a state: its own offers are offers.seller(i, j, .)
 * and offers.buyer(j, i, .); the partners' offers y are the opposite sides.
 */
struct KKTPoint {
  std::size_t agent = 0;
  PriceSystem prices;
  OfferTensor offers;
  KKTMultipliers multipliers;
};

struct KKTResidualReport {
  double primal = 0.0;
  double complementarity = 0.0;
  double dual = 0.0;
  double stationarity_price = 0.0;
  double stationarity_sell = 0.0;
  double stationarity_buy = 0.0;

  double stationarity() const {
    return std::max({stationarity_price, stationarity_sell, stationarity_buy});
  }
  double worst() const {
    return std::max({primal, complementarity, dual, stationarity()});
  }
};

inline KKTMultipliers zero_multipliers(std::size_t agents, std::size_t goods) {
  KKTMultipliers m;
  m.mu = FlowTensor(agents, goods);
  m.eta = FlowTensor(agents, goods);
  m.theta.assign(goods, 0.0);
  m.nu.assign(goods, 0.0);
  return m;
}

namespace detail {

struct AgentView {
  GoodBundle holding;
  std::vector<double> marginal;
};

inline AgentView agent_view(const Economy& economy, const KKTPoint& point) {
  AgentView v;
  v.holding = offer_holding(economy, point.offers, point.agent);
  GoodBundle x = v.holding;
  for (double& c : x) {
    c = std::max(c, 0.0);
  }
  v.marginal = utility_gradient(economy.agents[point.agent].utility, x).values;
  return v;
}

}  // namespace detail

/**
 * Max absolute violation per family of the agent's KKT system: primal
 * feasibility, complementary slackness, multiplier signs, and the three
 * stationarity equations (in p^i_k, x_ij,k and x_ji,k).
 */
inline KKTResidualReport kkt_residuals(const Economy& economy,
                                       const KKTPoint& point) {
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;
  const std::size_t i = point.agent;
  const auto& m = point.multipliers;
  const auto& o = point.offers;
  const auto view = detail::agent_view(economy, point);
  KKTResidualReport r;

  // Primal.
  double sum = 0.0;
  for (std::size_t k = 0; k < L; ++k) {
    double p = point.prices(i, k);
    sum += p;
    r.primal = std::max(r.primal, -p);
    r.primal = std::max(r.primal, -view.holding[k]);
  }
  r.primal = std::max(r.primal, std::abs(sum - 1.0));
  double value_out = 0.0;
  double value_in = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      continue;
    }
    for (std::size_t k = 0; k < L; ++k) {
      double sell = o.seller(i, j, k);
      double buy = o.buyer(j, i, k);
      r.primal = std::max({r.primal, -sell, -buy, sell - o.buyer(i, j, k),
                           buy - o.seller(j, i, k)});
      value_out += point.prices(i, k) * sell;
      value_in += point.prices(j, k) * buy;
    }
  }
  r.primal = std::max(r.primal, std::abs(value_out - value_in));

  // Complementarity and signs.
  for (std::size_t k = 0; k < L; ++k) {
    r.complementarity = std::max(
        {r.complementarity, std::abs(m.nu[k] * point.prices(i, k)),
         std::abs(m.theta[k] * view.holding[k])});
    r.dual = std::max({r.dual, -m.nu[k], -m.theta[k]});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      continue;
    }
    for (std::size_t k = 0; k < L; ++k) {
      double sell = o.seller(i, j, k);
      double buy = o.buyer(j, i, k);
      r.complementarity = std::max(
          {r.complementarity, std::abs(m.mu(i, j, k) * sell),
           std::abs(m.mu(j, i, k) * buy),
           std::abs(m.eta(i, j, k) * (o.buyer(i, j, k) - sell)),
           std::abs(m.eta(j, i, k) * (o.seller(j, i, k) - buy))});
      r.dual = std::max({r.dual, -m.mu(i, j, k), -m.mu(j, i, k),
                         -m.eta(i, j, k), -m.eta(j, i, k)});
    }
  }

  // Stationarity.
  for (std::size_t k = 0; k < L; ++k) {
    double out_k = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) {
        out_k += o.seller(i, j, k);
      }
    }
    r.stationarity_price = std::max(
        r.stationarity_price, std::abs(m.lambda * out_k + m.nu[k] + m.kappa));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      continue;
    }
    for (std::size_t k = 0; k < L; ++k) {
      double du = view.marginal[k];
      r.stationarity_sell = std::max(
          r.stationarity_sell,
          std::abs(-du + m.lambda * point.prices(i, k) + m.mu(i, j, k) -
                   m.eta(i, j, k) - m.theta[k]));
      r.stationarity_buy = std::max(
          r.stationarity_buy,
          std::abs(du - m.lambda * point.prices(j, k) + m.mu(j, i, k) -
                   m.eta(j, i, k) + m.theta[k]));
    }
  }
  return r;
}

/**
 * Fits multipliers to the stationarity equations by sign-constrained least
 * squares. Multipliers of inactive constraints are held at zero so that
 * complementarity holds by construction; lambda and kappa are free.
 */
inline KKTPoint recover_multipliers(const Economy& economy, KKTPoint point,
                                    double active_tolerance = 1e-9) {
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;
  const std::size_t i = point.agent;
  const auto& o = point.offers;
  const auto view = detail::agent_view(economy, point);

  // Column layout: lambda+, lambda-, kappa+, kappa-, then one column per
  // active inequality multiplier.
  enum class Kind { mu, eta, theta, nu };
  struct Column {
    Kind kind;
    std::size_t from = 0, to = 0, good = 0;
  };
  std::vector<Column> columns;
  for (std::size_t k = 0; k < L; ++k) {
    if (point.prices(i, k) <= active_tolerance) {
      columns.push_back({Kind::nu, 0, 0, k});
    }
    if (view.holding[k] <= active_tolerance) {
      columns.push_back({Kind::theta, 0, 0, k});
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      continue;
    }
    for (std::size_t k = 0; k < L; ++k) {
      double sell = o.seller(i, j, k);
      double buy = o.buyer(j, i, k);
      if (sell <= active_tolerance) columns.push_back({Kind::mu, i, j, k});
      if (buy <= active_tolerance) columns.push_back({Kind::mu, j, i, k});
      if (o.buyer(i, j, k) - sell <= active_tolerance)
        columns.push_back({Kind::eta, i, j, k});
      if (o.seller(j, i, k) - buy <= active_tolerance)
        columns.push_back({Kind::eta, j, i, k});
    }
  }

  const std::size_t partners = n - 1;
  const auto rows = static_cast<Eigen::Index>(L + 2 * partners * L);
  const auto cols = static_cast<Eigen::Index>(4 + columns.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);

  auto price_row = [&](std::size_t k) { return static_cast<Eigen::Index>(k); };
  std::vector<std::size_t> partner_index(n, 0);
  {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) partner_index[j] = c++;
    }
  }
  auto sell_row = [&](std::size_t j, std::size_t k) {
    return static_cast<Eigen::Index>(L + partner_index[j] * L + k);
  };
  auto buy_row = [&](std::size_t j, std::size_t k) {
    return static_cast<Eigen::Index>(L + partners * L + partner_index[j] * L + k);
  };

  // Equations are written as A z = b with the utility terms moved right.
  for (std::size_t k = 0; k < L; ++k) {
    double out_k = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) out_k += o.seller(i, j, k);
    }
    A(price_row(k), 0) = out_k;
    A(price_row(k), 1) = -out_k;
    A(price_row(k), 2) = 1.0;
    A(price_row(k), 3) = -1.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    for (std::size_t k = 0; k < L; ++k) {
      A(sell_row(j, k), 0) = point.prices(i, k);
      A(sell_row(j, k), 1) = -point.prices(i, k);
      b[sell_row(j, k)] = view.marginal[k];
      A(buy_row(j, k), 0) = -point.prices(j, k);
      A(buy_row(j, k), 1) = point.prices(j, k);
      b[buy_row(j, k)] = -view.marginal[k];
    }
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& col = columns[c];
    auto cc = static_cast<Eigen::Index>(4 + c);
    switch (col.kind) {
      case Kind::nu:
        A(price_row(col.good), cc) = 1.0;
        break;
      case Kind::theta:
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          A(sell_row(j, col.good), cc) = -1.0;
          A(buy_row(j, col.good), cc) = 1.0;
        }
        break;
      case Kind::mu:
        if (col.from == i) {
          A(sell_row(col.to, col.good), cc) = 1.0;
        } else {
          A(buy_row(col.from, col.good), cc) = 1.0;
        }
        break;
      case Kind::eta:
        if (col.from == i) {
          A(sell_row(col.to, col.good), cc) = -1.0;
        } else {
          A(buy_row(col.from, col.good), cc) = -1.0;
        }
        break;
    }
  }

  auto fit = numeric::nnls(A, b);
  const auto& z = fit.x;
  auto m = zero_multipliers(n, L);
  m.lambda = z[0] - z[1];
  m.kappa = z[2] - z[3];
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& col = columns[c];
    double v = z[static_cast<Eigen::Index>(4 + c)];
    switch (col.kind) {
      case Kind::nu: m.nu[col.good] = v; break;
      case Kind::theta: m.theta[col.good] = v; break;
      case Kind::mu: m.mu(col.from, col.to, col.good) = v; break;
      case Kind::eta: m.eta(col.from, col.to, col.good) = v; break;
    }
  }
  point.multipliers = std::move(m);
  return point;
}

}  // namespace effective_trade
