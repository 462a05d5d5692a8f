#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "effective_trade/discrete/enumerate.hpp"
#include "effective_trade/discrete/nash.hpp"
#include "effective_trade/discrete/pareto.hpp"
#include "effective_trade/dynamics/ascent.hpp"
#include "effective_trade/dynamics/state.hpp"
#include "effective_trade/exchange.hpp"

namespace effective_trade {

/// One executed trade of a non-tatonnement process.
struct TradeStep {
  FlowTensor flows;
  PriceSystem prices;
  std::vector<GoodBundle> new_endowments;
  std::vector<double> utilities_before;
  std::vector<double> utilities_after;
};

struct NontatonnementOptions {
  std::uint64_t seed = 0;
  /// Random weight vectors tried per continuous step.
  int attempts = 24;
  /// A gain counts as strict only above this.
  double improvement_tolerance = 1e-6;
  EnumerationOptions enumeration;
  AscentOptions ascent = [] {
    AscentOptions o;
    o.max_iterations = 4000;
    o.stop_tolerance = 1e-8;
    return o;
  }();
  NashOptions nash;
};

/// Weakly better for everyone, strictly better for someone.
inline bool pareto_improves(const std::vector<double>& after,
                            const std::vector<double>& before, double tol) {
  bool strict = false;
  for (std::size_t i = 0; i < after.size(); ++i) {
    if (after[i] < before[i] - 1e-12) {
      return false;
    }
    if (after[i] > before[i] + tol) {
      strict = true;
    }
  }
  return strict;
}

inline std::vector<double> endowment_utilities(const Economy& economy) {
  std::vector<double> u(economy.size());
  for (std::size_t i = 0; i < economy.size(); ++i) {
    u[i] = evaluate_utility(economy.agents[i].utility,
                            economy.agents[i].endowment);
  }
  return u;
}

namespace detail {

inline TradeStep to_step(const Economy& economy, const FlowTensor& flows,
                         const PriceSystem& prices,
                         const std::vector<double>& before) {
  TradeStep s;
  s.flows = flows;
  s.prices = prices;
  s.new_endowments = final_allocation(economy, flows);
  for (auto& x : s.new_endowments) {
    clamp_rounding(x);
  }
  s.utilities_before = before;
  s.utilities_after = utilities(economy, s.new_endowments);
  return s;
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  std::vector<double> w(n);
  for (double& v : w) {
    v = dist(rng);
  }
  return w;
}

inline PriceSystem random_prices(std::mt19937_64& rng, std::size_t n,
                                 std::size_t L) {
  std::exponential_distribution<double> dist(1.0);
  PriceSystem p(n, L);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (double& v : p.row(i)) {
      v = dist(rng);
      total += v;
    }
    for (double& v : p.row(i)) {
      v /= total;
    }
  }
  return p;
}

}  // namespace detail

/**
 * Looks for a feasible trade from the current endowments that leaves no one
 * worse off and someone better off.
 *
 * Discrete economies search the whole feasible set and take the candidate
 * with the largest weighted utility sum (random positive weights from the
 * seed, first in enumeration order on ties). Continuous economies run a
 * weighted projected ascent from autarky that refuses steps pushing anyone
 * below their current utility, for several weight and price draws.
 */
inline std::optional<TradeStep> nontatonnement_step(
    const Economy& economy, const NontatonnementOptions& options = {}) {
  const auto before = endowment_utilities(economy);
  std::mt19937_64 rng(options.seed);

  if (economy.mode == Mode::discrete) {
    auto weights = detail::random_weights(rng, economy.size());
    const EquilibriumRecord* best = nullptr;
    double best_score = 0.0;
    auto records = enumerate_feasible(economy, options.enumeration);
    for (const auto& r : records) {
      if (!pareto_improves(r.utilities, before, options.improvement_tolerance)) {
        continue;
      }
      double score = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        score += weights[i] * r.utilities[i];
      }
      if (!best || score > best_score) {
        best = &r;
        best_score = score;
      }
    }
    if (!best) {
      return std::nullopt;
    }
    return detail::to_step(economy, best->flows, best->witness, before);
  }

  for (int attempt = 0; attempt < options.attempts; ++attempt) {
    AscentOptions ascent = options.ascent;
    ascent.weights = attempt == 0 ? std::vector<double>(economy.size(), 1.0)
                                  : detail::random_weights(rng, economy.size());
    ascent.utility_floor = before;
    AscentState start = autarky_state(economy);
    if (attempt > 0) {
      start.prices = detail::random_prices(rng, economy.size(), economy.goods);
    }
    auto run = gradient_ascent(economy, start, ascent);
    auto after = offer_utilities(economy, run.terminal.offers);
    if (pareto_improves(after, before, options.improvement_tolerance)) {
      return detail::to_step(economy, effective_flows(run.terminal.offers),
                             run.terminal.prices, before);
    }
  }
  return std::nullopt;
}

/**
 * Picks, among the stage economy's Nash records, one that Pareto-improves
 * on the current endowments: largest total utility, first in enumeration
 * order on ties.
 */
inline std::optional<TradeStep> nontatonnement_nash_step(
    const Economy& economy, const NontatonnementOptions& options = {}) {
  if (economy.mode != Mode::discrete) {
    throw ContractViolation("nontatonnement_nash_step: economy must be discrete");
  }
  const auto before = endowment_utilities(economy);
  auto records = enumerate_feasible(economy, options.enumeration);
  auto nash = nash_set(economy, records, options.nash);

  const EquilibriumRecord* best = nullptr;
  double best_total = 0.0;
  for (const auto& r : nash) {
    if (!pareto_improves(r.utilities, before, options.improvement_tolerance)) {
      continue;
    }
    double total = 0.0;
    for (double u : r.utilities) {
      total += u;
    }
    if (!best || total > best_total + 1e-12) {
      best = &r;
      best_total = total;
    }
  }
  if (!best) {
    return std::nullopt;
  }
  return detail::to_step(economy, best->flows, best->witness, before);
}

struct ProcessRun {
  std::vector<TradeStep> steps;
  std::vector<GoodBundle> rest_endowments;
  bool terminated = false;
};

/// Iterates a step function until it returns none or max_steps is hit.
template <class StepFn>
ProcessRun run_process(const Economy& economy, StepFn&& step,
                       std::size_t max_steps = 200) {
  ProcessRun run;
  Economy stage = economy;
  for (std::size_t s = 0; s < max_steps; ++s) {
    auto next = step(stage);
    if (!next) {
      run.terminated = true;
      break;
    }
    stage = with_endowments(stage, next->new_endowments);
    run.steps.push_back(std::move(*next));
  }
  for (const auto& a : stage.agents) {
    run.rest_endowments.push_back(a.endowment);
  }
  return run;
}

/**
 * Random search for a Pareto-improving feasible trade, used to certify rest
 * points. Discrete economies draw uniformly from the feasible set; continuous
 * ones draw random prices and random flows projected onto the feasible set.
 */
inline std::optional<TradeStep> random_improvement_search(
    const Economy& economy, std::size_t samples, std::uint64_t seed,
    double improvement_tolerance = 1e-6,
    const EnumerationOptions& enumeration = {}) {
  const auto before = endowment_utilities(economy);
  std::mt19937_64 rng(seed);
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;

  if (economy.mode == Mode::discrete) {
    auto records = enumerate_feasible(economy, enumeration);
    std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
    for (std::size_t s = 0; s < samples; ++s) {
      const auto& r = records[pick(rng)];
      if (pareto_improves(r.utilities, before, improvement_tolerance)) {
        return detail::to_step(economy, r.flows, r.witness, before);
      }
    }
    return std::nullopt;
  }

  double scale = 0.0;
  for (const auto& a : economy.agents) {
    for (double w : a.endowment) {
      scale = std::max(scale, w);
    }
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    PriceSystem p = detail::random_prices(rng, n, L);
    OfferTensor offers(n, L);
    double size = scale * std::pow(unit(rng), 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < L && i != j; ++k) {
          double v = unit(rng) < 0.5 ? size * unit(rng) : 0.0;
          offers.seller(i, j, k) = v;
          offers.buyer(i, j, k) = v;
        }
      }
    }
    auto proj = project_feasible(economy, p, offers);
    auto after = offer_utilities(economy, proj.offers);
    if (pareto_improves(after, before, improvement_tolerance)) {
      return detail::to_step(economy, effective_flows(proj.offers), proj.prices,
                             before);
    }
  }
  return std::nullopt;
}

}  // namespace effective_trade
