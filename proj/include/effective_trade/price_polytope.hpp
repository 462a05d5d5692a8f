#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "effective_trade/economy.hpp"
#include "effective_trade/exchange.hpp"
#include "effective_trade/numeric/linear_program.hpp"
#include "effective_trade/numeric/nnls.hpp"

namespace effective_trade {

/**
 * Linear description of the prices that balance every budget for fixed
 * flows: Aeq p = beq with p >= 0, where p stacks the agents' rows.
 * Rows 0..n-1 are the simplex sums, rows n..2n-1 the budget residuals.
 */
struct PricePolytope {
  std::size_t agents = 0;
  std::size_t goods = 0;
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;

  std::size_t variables() const { return agents * goods; }
  std::size_t index(std::size_t agent, std::size_t good) const {
    return agent * goods + good;
  }
};

inline PricePolytope price_polytope(const FlowTensor& flows) {
  PricePolytope poly;
  const std::size_t n = flows.agents();
  const std::size_t L = flows.goods();
  poly.agents = n;
  poly.goods = L;
  poly.Aeq = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * n),
                                   static_cast<Eigen::Index>(n * L));
  poly.beq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    auto r = static_cast<Eigen::Index>(i);
    for (std::size_t k = 0; k < L; ++k) {
      poly.Aeq(r, static_cast<Eigen::Index>(poly.index(i, k))) = 1.0;
    }
    poly.beq[r] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto r = static_cast<Eigen::Index>(n + i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      for (std::size_t k = 0; k < L; ++k) {
        poly.Aeq(r, static_cast<Eigen::Index>(poly.index(j, k))) +=
            flows(j, i, k);
        poly.Aeq(r, static_cast<Eigen::Index>(poly.index(i, k))) -=
            flows(i, j, k);
      }
    }
  }
  return poly;
}

inline std::vector<numeric::LinearConstraint> equality_constraints(
    const PricePolytope& poly, std::size_t extra_variables = 0) {
  std::vector<numeric::LinearConstraint> out;
  const auto cols = poly.variables() + extra_variables;
  for (Eigen::Index r = 0; r < poly.Aeq.rows(); ++r) {
    numeric::LinearConstraint c;
    c.coefficients.assign(cols, 0.0);
    for (Eigen::Index v = 0; v < poly.Aeq.cols(); ++v) {
      c.coefficients[static_cast<std::size_t>(v)] = poly.Aeq(r, v);
    }
    c.relation = numeric::Relation::equal;
    c.rhs = poly.beq[r];
    out.push_back(std::move(c));
  }
  return out;
}

inline PriceSystem to_price_system(const PricePolytope& poly,
                                   std::span<const double> p) {
  PriceSystem out(poly.agents, poly.goods);
  for (std::size_t v = 0; v < poly.variables(); ++v) {
    out.data()[v] = std::max(0.0, p[v]);
  }
  return out;
}

struct PriceWitness {
  /// Closest point of the polytope to the uniform price system.
  PriceSystem prices;
  /// Dimension of the polytope's affine hull.
  int dimension = 0;
};

namespace detail {

inline int polytope_dimension(const PricePolytope& poly) {
  auto base = equality_constraints(poly);
  std::vector<Eigen::Index> pinned;
  for (std::size_t v = 0; v < poly.variables(); ++v) {
    std::vector<double> objective(poly.variables(), 0.0);
    objective[v] = 1.0;
    auto lp = numeric::maximize(objective, base);
    if (lp.status == numeric::LpStatus::optimal && lp.objective <= 1e-10) {
      pinned.push_back(static_cast<Eigen::Index>(v));
    }
  }
  Eigen::MatrixXd A(poly.Aeq.rows() + static_cast<Eigen::Index>(pinned.size()),
                    poly.Aeq.cols());
  A.topRows(poly.Aeq.rows()) = poly.Aeq;
  A.bottomRows(static_cast<Eigen::Index>(pinned.size())).setZero();
  for (std::size_t r = 0; r < pinned.size(); ++r) {
    A(poly.Aeq.rows() + static_cast<Eigen::Index>(r), pinned[r]) = 1.0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-10);
  return static_cast<int>(A.cols() - lu.rank());
}

}  // namespace detail

/**
 * Decides whether some price system balances every budget for these flows.
 *
 * Feasibility is settled by a phase-one simplex; the witness is then the
 * projection of the uniform price system onto the polytope.
 *
 * @param with_dimension Skip the per-coordinate LPs when false.
 */
inline std::optional<PriceWitness> price_feasibility_solve(
    const FlowTensor& flows, bool with_dimension = true) {
  const PricePolytope poly = price_polytope(flows);
  const auto nv = poly.variables();

  std::vector<double> zero(nv, 0.0);
  auto lp = numeric::maximize(zero, equality_constraints(poly));
  if (lp.status != numeric::LpStatus::optimal) {
    return std::nullopt;
  }

  Eigen::VectorXd target = Eigen::VectorXd::Constant(
      static_cast<Eigen::Index>(nv), 1.0 / static_cast<double>(poly.goods));
  Eigen::MatrixXd G =
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(nv),
                                static_cast<Eigen::Index>(nv));
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  auto projected = numeric::project_to_polyhedron(target, poly.Aeq, poly.beq, G, h);

  PriceWitness witness;
  if (projected && projected->residual <= 1e-9) {
    witness.prices = to_price_system(poly, std::span<const double>(
                                               projected->point.data(),
                                               nv));
  } else {
    witness.prices = to_price_system(poly, lp.x);
  }
  if (with_dimension) {
    witness.dimension = detail::polytope_dimension(poly);
  }
  return witness;
}

inline std::optional<PriceWitness> price_feasibility_solve(
    const Economy& economy, const FlowTensor& flows,
    bool with_dimension = true) {
  check_shape(economy, flows);
  return price_feasibility_solve(flows, with_dimension);
}

}  // namespace effective_trade
