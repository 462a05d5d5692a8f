#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "effective_trade/dynamics/state.hpp"
#include "effective_trade/economy.hpp"
#include "effective_trade/error.hpp"
#include "effective_trade/exchange.hpp"
#include "effective_trade/numeric/nnls.hpp"
#include "effective_trade/numeric/simplex_projection.hpp"

namespace effective_trade {

/// Worst violation per constraint family after a projection.
struct ProjectionResiduals {
  double simplex = 0.0;
  double budget = 0.0;
  double holding = 0.0;
  double nonnegativity = 0.0;
  double capacity = 0.0;
  double cross_caps = 0.0;

  double worst() const {
    return std::max({simplex, budget, holding, nonnegativity, capacity,
                     cross_caps});
  }
};

struct ProjectionResult {
  PriceSystem prices;
  OfferTensor offers;
  double distance = 0.0;
  ProjectionResiduals residuals;
};

inline ProjectionResiduals projection_residuals(const Economy& economy,
                                                const PriceSystem& prices,
                                                const OfferTensor& offers) {
  ProjectionResiduals r;
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double p : prices.row(i)) {
      sum += p;
      r.simplex = std::max(r.simplex, -p);
    }
    r.simplex = std::max(r.simplex, std::abs(sum - 1.0));
  }
  FlowTensor q(n, L);
  for (std::size_t e = 0; e < q.data().size(); ++e) {
    q.data()[e] = std::max(
        0.0, std::min(offers.seller.data()[e], offers.buyer.data()[e]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < L; ++k) {
      q(i, i, k) = 0.0;
    }
  }
  for (double b : budget_residuals(prices, q)) {
    r.budget = std::max(r.budget, std::abs(b));
  }
  for (std::size_t i = 0; i < n; ++i) {
    GoodBundle x = holding(economy, q, i);
    const auto& set = economy.agents[i].consumption;
    for (std::size_t k = 0; k < L; ++k) {
      r.holding = std::max({r.holding, set.lower_bound(k) - x[k],
                            x[k] - set.upper_bound(k)});
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      for (std::size_t k = 0; k < L; ++k) {
        double s = offers.seller(i, j, k);
        double b = offers.buyer(i, j, k);
        r.nonnegativity = std::max({r.nonnegativity, -s, -b});
        r.cross_caps = std::max(r.cross_caps, std::abs(s - b));
        double cap = economy.capacity(i, j, k);
        r.capacity = std::max({r.capacity, s - cap, b - cap});
      }
    }
  }
  return r;
}

/**
 * Nearest feasible point, with prices held at their simplex projection
 * while the flows are projected (budgets are linear in the flows once
 * prices are fixed, so that set is a polyhedron and the projection is
 * exact). Offers are re-saturated to the projected flows.
 *
 * @param max_iterations Cap handed to the active-set solver.
 */
inline ProjectionResult project_feasible(const Economy& economy,
                                         const PriceSystem& prices,
                                         const OfferTensor& offers,
                                         int max_iterations = 10000) {
  check_shape(economy, prices);
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;

  ProjectionResult out;
  out.prices = prices;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = numeric::project_to_simplex(prices.row(i));
    std::copy(row.begin(), row.end(), out.prices.row(i).begin());
  }

  // Variables: off-diagonal flows in (from, to, good) order.
  struct Var {
    std::size_t from, to, good;
  };
  std::vector<Var> vars;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) {
        for (std::size_t k = 0; k < L; ++k) {
          vars.push_back({i, j, k});
        }
      }
    }
  }
  const auto nv = static_cast<Eigen::Index>(vars.size());
  if (nv == 0) {
    out.offers = OfferTensor(n, L);
    out.residuals = projection_residuals(economy, out.prices, out.offers);
    return out;
  }

  // Two-sided offers collapse onto their mean: that is the projection onto
  // the matched set seller == buyer.
  Eigen::VectorXd target(nv);
  for (Eigen::Index v = 0; v < nv; ++v) {
    const auto& e = vars[static_cast<std::size_t>(v)];
    target[v] = 0.5 * (offers.seller(e.from, e.to, e.good) +
                       offers.buyer(e.from, e.to, e.good));
  }

  Eigen::MatrixXd Aeq = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), nv);
  for (Eigen::Index v = 0; v < nv; ++v) {
    const auto& e = vars[static_cast<std::size_t>(v)];
    Aeq(static_cast<Eigen::Index>(e.to), v) += out.prices(e.from, e.good);
    Aeq(static_cast<Eigen::Index>(e.from), v) -= out.prices(e.from, e.good);
  }
  Eigen::VectorXd beq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (Eigen::Index v = 0; v < nv; ++v) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nv);
    r[v] = 1.0;
    rows.push_back(r);
    rhs.push_back(0.0);
    const auto& e = vars[static_cast<std::size_t>(v)];
    double cap = economy.capacity(e.from, e.to, e.good);
    if (std::isfinite(cap)) {
      rows.push_back(-r);
      rhs.push_back(-cap);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& set = economy.agents[i].consumption;
    for (std::size_t k = 0; k < L; ++k) {
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nv);
      for (Eigen::Index v = 0; v < nv; ++v) {
        const auto& e = vars[static_cast<std::size_t>(v)];
        if (e.good != k) continue;
        if (e.to == i) r[v] += 1.0;
        if (e.from == i) r[v] -= 1.0;
      }
      double w = economy.agents[i].endowment[k];
      rows.push_back(r);
      rhs.push_back(set.lower_bound(k) - w);
      if (std::isfinite(set.upper_bound(k))) {
        rows.push_back(-r);
        rhs.push_back(w - set.upper_bound(k));
      }
    }
  }
  Eigen::MatrixXd G(static_cast<Eigen::Index>(rows.size()), nv);
  Eigen::VectorXd h(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    G.row(static_cast<Eigen::Index>(r)) = rows[r];
    h[static_cast<Eigen::Index>(r)] = rhs[r];
  }

  auto projected = numeric::project_to_polyhedron(target, Aeq, beq, G, h,
                                                  1e-9, max_iterations);
  if (projected && !projected->converged) {
    throw NumericalError("project_feasible: iteration cap reached",
                         projected->residual);
  }
  if (!projected) {
    throw NumericalError("project_feasible: empty feasible set",
                         std::numeric_limits<double>::infinity());
  }

  FlowTensor q(n, L);
  for (Eigen::Index v = 0; v < nv; ++v) {
    const auto& e = vars[static_cast<std::size_t>(v)];
    q(e.from, e.to, e.good) = std::max(0.0, projected->point[v]);
  }
  out.offers = OfferTensor::saturated(q);
  out.distance = (projected->point - target).norm();
  out.residuals = projection_residuals(economy, out.prices, out.offers);
  if (out.residuals.worst() > 1e-7) {
    throw NumericalError("project_feasible: residual above tolerance",
                         out.residuals.worst());
  }
  return out;
}

inline ProjectionResult project_feasible(const Economy& economy,
                                         const AscentState& state) {
  return project_feasible(economy, state.prices, state.offers);
}

}  // namespace effective_trade
