#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "effective_trade/dynamics/projection.hpp"
#include "effective_trade/dynamics/state.hpp"
#include "effective_trade/dynamics/supergradient.hpp"

namespace effective_trade {

/// mu_t as a function of the step index (t starts at 1).
using StepSchedule = std::function<double(std::size_t)>;

inline StepSchedule inverse_sqrt_schedule(double c = 0.1) {
  return [c](std::size_t t) { return c / std::sqrt(static_cast<double>(t)); };
}

struct AscentOptions {
  StepSchedule schedule = inverse_sqrt_schedule();
  double stop_tolerance = 1e-6;
  std::size_t max_iterations = 20000;
  /// Halve a step (at most this many times) while it would lower welfare.
  int max_halvings = 60;
  /// Positive per-agent weights; empty means plain welfare.
  std::vector<double> weights;
  /// Reject steps that leave any agent below this utility floor.
  std::vector<double> utility_floor;
};

struct TrajectoryPoint {
  std::size_t t = 0;
  double welfare = 0.0;
  double step_norm = 0.0;
  double step_size = 0.0;
  double residual = 0.0;
};

struct AscentResult {
  std::vector<TrajectoryPoint> trajectory;
  AscentState terminal;
  bool converged = false;
  std::string diagnostic;
};

/**
 * Projected supergradient ascent on welfare:
 * X <- proj(X + mu_t dU), prices held at their current value.
 *
 * A step that would lower welfare is halved until it does not; the run stops
 * once the accepted projected step is shorter than stop_tolerance.
 */
inline AscentResult gradient_ascent(const Economy& economy,
                                    const AscentState& initial,
                                    const AscentOptions& options = {}) {
  AscentResult result;
  auto start = project_feasible(economy, initial.prices, initial.offers);
  AscentState state;
  state.prices = start.prices;
  state.offers = start.offers;
  state.welfare = welfare(economy, state.offers, options.weights);
  result.trajectory.push_back({0, state.welfare, 0.0, 0.0,
                               start.residuals.worst()});

  auto above_floor = [&](const OfferTensor& offers) {
    if (options.utility_floor.empty()) {
      return true;
    }
    auto u = offer_utilities(economy, offers);
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] < options.utility_floor[i]) {
        return false;
      }
    }
    return true;
  };

  for (std::size_t t = 1; t <= options.max_iterations; ++t) {
    state.t = t;
    const double nominal = options.schedule(t);
    auto direction = welfare_supergradient(economy, state, options.weights);

    double mu = nominal;
    bool accepted = false;
    ProjectionResult next;
    double next_welfare = state.welfare;
    for (int h = 0; h <= options.max_halvings; ++h, mu *= 0.5) {
      OfferTensor trial = state.offers;
      auto ts = trial.seller.data();
      auto tb = trial.buyer.data();
      auto ds = direction.offers.seller.data();
      auto db = direction.offers.buyer.data();
      for (std::size_t e = 0; e < ts.size(); ++e) {
        ts[e] += mu * ds[e];
        tb[e] += mu * db[e];
      }
      next = project_feasible(economy, state.prices, trial);
      next_welfare = welfare(economy, next.offers, options.weights);
      if (next_welfare >= state.welfare && above_floor(next.offers)) {
        accepted = true;
        break;
      }
    }

    double step_norm = 0.0;
    if (accepted) {
      step_norm = distance(next.offers.seller, state.offers.seller);
      state.offers = next.offers;
      state.welfare = next_welfare;
      state.step = mu;
    } else {
      mu = 0.0;
      state.step = 0.0;
    }
    result.trajectory.push_back(
        {t, state.welfare, step_norm, mu, next.residuals.worst()});

    if (step_norm < options.stop_tolerance) {
      result.converged = true;
      result.diagnostic = accepted ? "projected step below tolerance"
                                   : "no ascent step available";
      result.terminal = state;
      return result;
    }
  }
  result.diagnostic = "iteration cap reached";
  result.terminal = state;
  return result;
}

/// Autarky with uniform prices.
inline AscentState autarky_state(const Economy& economy) {
  AscentState s;
  s.prices = PriceSystem::uniform(economy.size(), economy.goods);
  s.offers = OfferTensor(economy.size(), economy.goods);
  s.welfare = welfare(economy, s.offers);
  return s;
}

}  // namespace effective_trade
