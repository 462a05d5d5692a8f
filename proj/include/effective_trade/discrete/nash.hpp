#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "effective_trade/discrete/pareto.hpp"
#include "effective_trade/discrete/record.hpp"
#include "effective_trade/economy.hpp"
#include "effective_trade/error.hpp"
#include "effective_trade/exchange.hpp"
#include "effective_trade/numeric/linear_program.hpp"
#include "effective_trade/price_polytope.hpp"
#include "effective_trade/utility.hpp"

namespace effective_trade {

/**
 * A unilateral deviation that beats the record: the deviator's sub-flows,
 * the price row that balances its budget afterwards, and the gain.
 */
struct DeviationCertificate {
  std::size_t agent = 0;
  /// Full flow tensor after the deviation.
  FlowTensor flows;
  std::vector<double> price_row;
  double utility_gain = 0.0;
};

struct NashVerdict {
  bool nash = false;
  /// A price system in the record's polytope at which no deviation pays.
  std::optional<PriceSystem> witness;
  WitnessSource source = WitnessSource::canonical;
  std::optional<DeviationCertificate> certificate;

  explicit operator bool() const { return nash; }
};

struct NashOptions {
  /// Gains at or below this are not improvements.
  double gain_tolerance = 1e-12;
  /// Required distance between a witness and every improving deviation.
  double margin = 1e-9;
  std::size_t max_nodes = 200000;
};

namespace detail {

/**
 * The prices (of everyone but the deviator) at which one improving
 * deviation can be balanced: lo <= a.p <= hi, where a.p values the goods
 * the deviator still receives and [lo, hi] is the range of values its
 * remaining shipments can take under a simplex price row.
 */
struct Slab {
  std::vector<double> a;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t agent = 0;
  double gain = 0.0;
  FlowTensor flows;
  std::vector<double> shipped;
};

inline double slab_value(const Slab& s, std::span<const double> p) {
  double v = 0.0;
  for (std::size_t c = 0; c < s.a.size(); ++c) {
    v += s.a[c] * p[c];
  }
  return v;
}

inline bool inside(const Slab& s, std::span<const double> p, double margin) {
  double v = slab_value(s, p);
  return v >= s.lo - margin && v <= s.hi + margin;
}

/// Improving sub-flow deviations of every agent, one slab per distinct
/// price condition (the largest gain is kept).
inline std::vector<Slab> improving_deviations(const Economy& economy,
                                              const EquilibriumRecord& record,
                                              double gain_tolerance) {
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;
  const FlowTensor& q = record.flows;

  std::vector<Slab> slabs;
  std::map<std::tuple<std::size_t, std::vector<double>, double, double>,
           std::size_t>
      seen;

  for (std::size_t i = 0; i < n; ++i) {
    struct Entry {
      std::size_t from, to, good;
      int top;
    };
    std::vector<Entry> entries;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      for (std::size_t k = 0; k < L; ++k) {
        if (q(i, j, k) > 0) {
          entries.push_back({i, j, k, static_cast<int>(std::llround(q(i, j, k)))});
        }
        if (q(j, i, k) > 0) {
          entries.push_back({j, i, k, static_cast<int>(std::llround(q(j, i, k)))});
        }
      }
    }
    if (entries.empty()) {
      continue;
    }

    const auto& agent = economy.agents[i];
    const double base = record.utilities[i];
    FlowTensor d = q;

    auto consider = [&] {
      GoodBundle x = holding(economy, d, i);
      if (!agent.consumption.contains(x, 1e-12)) {
        return;
      }
      for (double v : x) {
        if (v < 0.0) {
          return;
        }
      }
      double gain = evaluate_utility(agent.utility, x) - base;
      if (gain <= gain_tolerance) {
        return;
      }
      Slab s;
      s.agent = i;
      s.a.assign(n * L, 0.0);
      s.shipped.assign(L, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          continue;
        }
        for (std::size_t k = 0; k < L; ++k) {
          s.a[j * L + k] = d(j, i, k);
          s.shipped[k] += d(i, j, k);
        }
      }
      s.lo = *std::min_element(s.shipped.begin(), s.shipped.end());
      s.hi = *std::max_element(s.shipped.begin(), s.shipped.end());
      s.gain = gain;
      auto key = std::make_tuple(i, s.a, s.lo, s.hi);
      auto it = seen.find(key);
      if (it == seen.end()) {
        s.flows = d;
        seen.emplace(std::move(key), slabs.size());
        slabs.push_back(std::move(s));
      } else if (gain > slabs[it->second].gain) {
        slabs[it->second].gain = gain;
        slabs[it->second].flows = d;
      }
    };

    auto recurse = [&](auto&& self, std::size_t m, bool changed) -> void {
      if (m == entries.size()) {
        if (changed) {
          consider();
        }
        return;
      }
      const auto& e = entries[m];
      for (int v = 0; v <= e.top; ++v) {
        d(e.from, e.to, e.good) = v;
        self(self, m + 1, changed || v != e.top);
      }
      d(e.from, e.to, e.good) = e.top;
    };
    recurse(recurse, 0, false);
  }
  return slabs;
}

inline std::vector<double> balancing_row(const Slab& s, double value) {
  const std::size_t L = s.shipped.size();
  std::size_t kmin = static_cast<std::size_t>(
      std::min_element(s.shipped.begin(), s.shipped.end()) - s.shipped.begin());
  std::size_t kmax = static_cast<std::size_t>(
      std::max_element(s.shipped.begin(), s.shipped.end()) - s.shipped.begin());
  std::vector<double> row(L, 0.0);
  if (s.hi - s.lo <= 0.0) {
    row[kmin] = 1.0;
    return row;
  }
  double theta = std::clamp((value - s.lo) / (s.hi - s.lo), 0.0, 1.0);
  row[kmin] += 1.0 - theta;
  row[kmax] += theta;
  return row;
}

/// Searches the polytope for a point outside every slab by branching on
/// the side of each slab; each node maximizes the clearance with an LP.
inline std::optional<std::vector<double>> uncovered_point(
    const PricePolytope& poly, const std::vector<Slab>& slabs,
    const NashOptions& options) {
  const std::size_t nv = poly.variables();
  const auto base = equality_constraints(poly, 1);
  std::vector<double> objective(nv + 1, 0.0);
  objective[nv] = 1.0;

  struct Side {
    std::size_t slab;
    bool below;
  };
  std::vector<std::vector<Side>> stack{{}};
  std::size_t nodes = 0;

  while (!stack.empty()) {
    auto sides = std::move(stack.back());
    stack.pop_back();
    if (++nodes > options.max_nodes) {
      throw NumericalError("nash search: node limit reached",
                           static_cast<double>(nodes));
    }

    auto constraints = base;
    numeric::LinearConstraint cap;
    cap.coefficients.assign(nv + 1, 0.0);
    cap.coefficients[nv] = 1.0;
    cap.relation = numeric::Relation::less_equal;
    cap.rhs = 1.0;
    constraints.push_back(cap);
    std::vector<bool> fixed(slabs.size(), false);
    for (const auto& side : sides) {
      const Slab& s = slabs[side.slab];
      fixed[side.slab] = true;
      numeric::LinearConstraint c;
      c.coefficients.assign(s.a.begin(), s.a.end());
      c.coefficients.push_back(side.below ? 1.0 : -1.0);
      c.relation = side.below ? numeric::Relation::less_equal
                              : numeric::Relation::greater_equal;
      c.rhs = side.below ? s.lo : s.hi;
      constraints.push_back(std::move(c));
    }

    auto lp = numeric::maximize(objective, constraints);
    if (lp.status != numeric::LpStatus::optimal ||
        lp.x[nv] <= options.margin) {
      continue;
    }
    std::span<const double> p(lp.x.data(), nv);

    std::optional<std::size_t> hit;
    for (std::size_t s = 0; s < slabs.size(); ++s) {
      if (!fixed[s] && inside(slabs[s], p, options.margin)) {
        hit = s;
        break;
      }
    }
    if (!hit) {
      return std::vector<double>(p.begin(), p.end());
    }
    // Depth-first; the "below" side is explored first.
    auto above = sides;
    above.push_back({*hit, false});
    stack.push_back(std::move(above));
    sides.push_back({*hit, true});
    stack.push_back(std::move(sides));
  }
  return std::nullopt;
}

}  // namespace detail

/**
 * Whether some price system in the record's polytope makes it a Nash state.
 *
 * Offers are taken to equal the flows, so an agent may only scale back its
 * own trades (any integer sub-flow on its links) and then pick any price
 * row that balances its budget. The stored witness is tried first.
 */
inline NashVerdict is_nash(const Economy& economy,
                           const EquilibriumRecord& record,
                           const NashOptions& options = {}) {
  if (!record.flags.feasible) {
    throw ContractViolation("is_nash: record is not feasible");
  }
  NashVerdict verdict;
  auto slabs =
      detail::improving_deviations(economy, record, options.gain_tolerance);

  std::span<const double> canonical = record.witness.data();
  bool canonical_clear = std::none_of(
      slabs.begin(), slabs.end(),
      [&](const detail::Slab& s) { return detail::inside(s, canonical, options.margin); });
  if (canonical_clear) {
    verdict.nash = true;
    verdict.witness = record.witness;
    verdict.source = WitnessSource::canonical;
    return verdict;
  }

  const PricePolytope poly = price_polytope(record.flows);
  if (auto p = detail::uncovered_point(poly, slabs, options)) {
    verdict.nash = true;
    verdict.witness = to_price_system(poly, *p);
    verdict.source = WitnessSource::nash_search;
    return verdict;
  }

  // Report the best deviation that is available at the stored witness.
  const detail::Slab* best = nullptr;
  for (const auto& s : slabs) {
    if (detail::inside(s, canonical, options.margin) &&
        (!best || s.gain > best->gain)) {
      best = &s;
    }
  }
  if (best) {
    DeviationCertificate cert;
    cert.agent = best->agent;
    cert.flows = best->flows;
    cert.price_row =
        detail::balancing_row(*best, detail::slab_value(*best, canonical));
    cert.utility_gain = best->gain;
    verdict.certificate = std::move(cert);
  }
  return verdict;
}

/// Records that pass is_nash, with nash flags and witnesses updated.
inline std::vector<EquilibriumRecord> nash_set(
    const Economy& economy, const std::vector<EquilibriumRecord>& records,
    const NashOptions& options = {}) {
  std::vector<EquilibriumRecord> out;
  for (const auto& r : records) {
    auto verdict = is_nash(economy, r, options);
    if (verdict.nash) {
      EquilibriumRecord copy = r;
      copy.flags.nash = true;
      copy.witness = *verdict.witness;
      copy.witness_source = verdict.source;
      out.push_back(std::move(copy));
    }
  }
  return out;
}

/// Marks the Pareto frontier computed within an already computed Nash set.
inline void mark_nash_pareto(std::vector<EquilibriumRecord>& nash_records) {
  std::vector<std::vector<double>> profiles;
  for (const auto& r : nash_records) {
    profiles.push_back(r.utilities);
  }
  for (auto& r : nash_records) {
    r.flags.nash_pareto = false;
  }
  for (std::size_t i : pareto_indices(profiles)) {
    nash_records[i].flags.nash_pareto = nash_records[i].flags.nash;
  }
}

inline std::vector<EquilibriumRecord> nash_pareto_set(
    std::vector<EquilibriumRecord> nash_records) {
  mark_nash_pareto(nash_records);
  std::vector<EquilibriumRecord> out;
  for (auto& r : nash_records) {
    if (r.flags.nash_pareto) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace effective_trade
