#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's solvers; only the plain data types are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "effective_trade/economy.hpp"

namespace oracle {

using effective_trade::Agent;
using effective_trade::CesUtility;
using effective_trade::Economy;
using effective_trade::FlowTensor;
using effective_trade::Mode;

/// Three agents, two goods, common exponent 0.3.
inline Economy three_agent_economy(Mode mode = Mode::discrete) {
  Economy e;
  e.goods = 2;
  e.mode = mode;
  const double w[3][2] = {{3, 1}, {2, 2}, {1, 3}};
  const double alpha[3] = {0.2, 0.4, 0.8};
  for (int i = 0; i < 3; ++i) {
    Agent a;
    a.name = std::string(1, static_cast<char>('a' + i));
    a.endowment = {w[i][0], w[i][1]};
    a.utility = CesUtility{{alpha[i], 1.0 - alpha[i]}, 0.3};
    a.money = 1.0;
    e.agents.push_back(a);
  }
  return e;
}

/// (sum_k a_k x_k^r)^(1/r), written out directly.
inline double ces(const std::vector<double>& a, double r,
                  const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) continue;
    s += a[k] * std::pow(x[k], r);
  }
  return std::pow(s, 1.0 / r);
}

inline std::vector<double> bundle_after(const Economy& e, const FlowTensor& q,
                                   std::size_t i) {
  std::vector<double> x = e.agents[i].endowment;
  for (std::size_t j = 0; j < e.size(); ++j) {
    for (std::size_t k = 0; k < e.goods; ++k) {
      if (j != i) x[k] += q(j, i, k) - q(i, j, k);
    }
  }
  return x;
}

inline double utility_of(const Economy& e, const FlowTensor& q, std::size_t i) {
  const auto& u = std::get<CesUtility>(e.agents[i].utility);
  return ces(u.weights, u.exponent, bundle_after(e, q, i));
}

/**
 * Two-good price sets. Variable x_i is agent i's price of good 1 (good 2
 * gets 1 - x_i); budgets are A x = b. Vertices of {A x = b, 0 <= x <= 1}
 * are found by fixing each coordinate to 0, 1 or leaving it free and
 * solving the rest.
 */
struct TwoGoodPolytope {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

inline TwoGoodPolytope two_good_budgets(const FlowTensor& q) {
  const auto n = static_cast<Eigen::Index>(q.agents());
  TwoGoodPolytope P{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  // in_i - out_i = 0 with p(j,1) = x_j, p(j,2) = 1 - x_j.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double in1 = q(j, i, 0), in2 = q(j, i, 1);
      double out1 = q(i, j, 0), out2 = q(i, j, 1);
      P.A(i, j) += in1 - in2;
      P.b(i) -= in2;
      P.A(i, i) -= out1 - out2;
      P.b(i) += out2;
    }
  }
  return P;
}

inline std::vector<Eigen::VectorXd> vertices(const TwoGoodPolytope& P,
                                             double tol = 1e-9) {
  const auto n = P.A.cols();
  std::vector<Eigen::VectorXd> out;
  std::vector<int> pattern(static_cast<std::size_t>(n), 0);
  long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<Eigen::Index> free;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      int s = static_cast<int>(c % 3);
      c /= 3;
      if (s == 2) free.push_back(i);
      else x(i) = s;
    }
    Eigen::VectorXd rhs = P.b - P.A * x;
    if (!free.empty()) {
      Eigen::MatrixXd Af(P.A.rows(), static_cast<Eigen::Index>(free.size()));
      for (std::size_t f = 0; f < free.size(); ++f) Af.col(static_cast<Eigen::Index>(f)) = P.A.col(free[f]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(Af);
      if (lu.rank() < static_cast<Eigen::Index>(free.size())) continue;
      Eigen::VectorXd y = Af.colPivHouseholderQr().solve(rhs);
      for (std::size_t f = 0; f < free.size(); ++f) x(free[f]) = y(static_cast<Eigen::Index>(f));
    }
    if ((P.A * x - P.b).cwiseAbs().maxCoeff() > tol) continue;
    if (x.minCoeff() < -tol || x.maxCoeff() > 1 + tol) continue;
    bool dup = false;
    for (const auto& v : out) dup = dup || (v - x).cwiseAbs().maxCoeff() < 1e-9;
    if (!dup) out.push_back(x);
  }
  return out;
}

/// Points spread over the polytope: vertices, midpoints, centroid, random mixes.
inline std::vector<Eigen::VectorXd> polytope_samples(
    const std::vector<Eigen::VectorXd>& vs, std::size_t random, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> pts = vs;
  if (vs.empty()) return pts;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(vs[0].size());
  for (const auto& v : vs) c += v / static_cast<double>(vs.size());
  pts.push_back(c);
  for (std::size_t a = 0; a < vs.size(); ++a)
    for (std::size_t b = a + 1; b < vs.size(); ++b) pts.push_back((vs[a] + vs[b]) / 2);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> ex(1.0);
  for (std::size_t s = 0; s < random; ++s) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(vs[0].size());
    double tot = 0;
    for (const auto& v : vs) {
      double g = ex(rng);
      x += g * v;
      tot += g;
    }
    pts.push_back(x / tot);
  }
  return pts;
}

/**
 * Does agent i have a profitable deviation when the others' good-1 prices
 * are x? A deviation keeps any integer part of each of i's trades; it is
 * balanced if some own price row makes out-value equal in-value.
 */
inline bool has_deviation(const Economy& e, const FlowTensor& q,
                          const Eigen::VectorXd& x, std::size_t i,
                          double tol = 1e-9) {
  struct Entry { std::size_t from, to, good; int top; };
  std::vector<Entry> entries;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (j == i) continue;
    for (std::size_t k = 0; k < 2; ++k) {
      if (q(i, j, k) > 0) entries.push_back({i, j, k, static_cast<int>(std::lround(q(i, j, k)))});
      if (q(j, i, k) > 0) entries.push_back({j, i, k, static_cast<int>(std::lround(q(j, i, k)))});
    }
  }
  const double base = utility_of(e, q, i);
  std::vector<int> level(entries.size(), 0);
  while (true) {
    FlowTensor d = q;
    for (std::size_t t = 0; t < entries.size(); ++t)
      d(entries[t].from, entries[t].to, entries[t].good) = level[t];
    auto h = bundle_after(e, d, i);
    bool ok = h[0] >= 0 && h[1] >= 0;
    if (ok && utility_of(e, d, i) > base + 1e-12) {
      double in = 0, s1 = 0, s2 = 0;
      for (std::size_t j = 0; j < e.size(); ++j) {
        if (j == i) continue;
        auto xj = static_cast<Eigen::Index>(j);
        in += x(xj) * d(j, i, 0) + (1 - x(xj)) * d(j, i, 1);
        s1 += d(i, j, 0);
        s2 += d(i, j, 1);
      }
      double lo = std::min(s1, s2), hi = std::max(s1, s2);
      if (in >= lo - tol && in <= hi + tol) return true;
    }
    std::size_t t = 0;
    while (t < entries.size() && level[t] == entries[t].top) level[t++] = 0;
    if (t == entries.size()) break;
    ++level[t];
  }
  return false;
}

/// Nash by sampling the price polytope; x_i of the deviator is irrelevant.
inline bool sampled_nash(const Economy& e, const FlowTensor& q,
                         std::size_t random = 400, std::uint64_t seed = 1) {
  auto vs = vertices(two_good_budgets(q));
  for (const auto& x : polytope_samples(vs, random, seed)) {
    bool clear = true;
    for (std::size_t i = 0; i < e.size() && clear; ++i) clear = !has_deviation(e, q, x, i);
    if (clear) return true;
  }
  return false;
}

/**
 * Mode of a belief with integer weights. Masses are compared as integers,
 * so ties are exact. Returns image values in order of first appearance.
 */
template <class Value>
std::vector<Value> integer_mode(const std::vector<Value>& images,
                                const std::vector<long>& weights) {
  std::vector<Value> values;
  std::vector<long> mass;
  for (std::size_t s = 0; s < images.size(); ++s) {
    auto it = std::find(values.begin(), values.end(), images[s]);
    if (it == values.end()) {
      values.push_back(images[s]);
      mass.push_back(weights[s]);
    } else {
      mass[static_cast<std::size_t>(it - values.begin())] += weights[s];
    }
  }
  long top = *std::max_element(mass.begin(), mass.end());
  std::vector<Value> out;
  for (std::size_t g = 0; g < values.size(); ++g)
    if (mass[g] == top) out.push_back(values[g]);
  return out;
}

}  // namespace oracle
