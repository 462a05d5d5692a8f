#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <variant>
#include <vector>

#include "effective_trade/economy.hpp"
#include "effective_trade/error.hpp"

namespace effective_trade {

/// Cap on one-sided derivatives at the boundary of the orthant.
inline constexpr double kDerivativeCap = 1e6;

inline double evaluate_utility(const CesUtility& u, std::span<const double> x) {
  if (x.size() != u.weights.size()) {
    throw ContractViolation("utility: bundle dimension mismatch");
  }
  if (u.exponent == 0.0) {
    throw ContractViolation("utility: CES exponent must be non-zero");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] < 0.0) {
      throw ContractViolation("utility: negative quantity");
    }
    // A zero weight contributes nothing, even where x^r is infinite.
    if (u.weights[k] != 0.0) {
      sum += u.weights[k] * std::pow(x[k], u.exponent);
    }
  }
  return std::pow(sum, 1.0 / u.exponent);
}

inline double evaluate_utility(const UtilitySpec& spec,
                               std::span<const double> x) {
  if (const auto* ces = std::get_if<CesUtility>(&spec)) {
    return evaluate_utility(*ces, x);
  }
  const auto& custom = std::get<CustomUtility>(spec);
  if (custom.goods != 0 && x.size() != custom.goods) {
    throw ContractViolation("utility: bundle dimension mismatch");
  }
  for (double v : x) {
    if (v < 0.0) {
      throw ContractViolation("utility: negative quantity");
    }
  }
  return custom.value(x);
}

struct UtilityGradient {
  std::vector<double> values;
  /// True when some component was a capped one-sided derivative.
  bool boundary = false;
};

/**
 * Gradient of u at x. At x_k = 0, where the CES derivative blows up for
 * r < 1, the one-sided derivative is reported capped at kDerivativeCap.
 */
inline UtilityGradient utility_gradient(const UtilitySpec& spec,
                                        std::span<const double> x) {
  UtilityGradient g;
  g.values.assign(x.size(), 0.0);

  if (const auto* ces = std::get_if<CesUtility>(&spec)) {
    const double r = ces->exponent;
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (ces->weights[k] != 0.0) {
        sum += ces->weights[k] * std::pow(x[k], r);
      }
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      double a = ces->weights[k];
      if (a == 0.0) {
        continue;
      }
      if (x[k] <= 0.0 && r < 1.0) {
        g.values[k] = kDerivativeCap;
        g.boundary = true;
        continue;
      }
      double d = a * std::pow(x[k], r - 1.0) * std::pow(sum, 1.0 / r - 1.0);
      if (!std::isfinite(d) || d > kDerivativeCap) {
        d = kDerivativeCap;
        g.boundary = true;
      }
      g.values[k] = d;
    }
    return g;
  }

  const auto& custom = std::get<CustomUtility>(spec);
  if (custom.gradient) {
    g.values = custom.gradient(x);
    return g;
  }
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t k = 0; k < x.size(); ++k) {
    double h = 1e-6 * std::max(1.0, std::abs(x[k]));
    double saved = probe[k];
    double lo = std::max(0.0, saved - h);
    probe[k] = saved + h;
    double up = custom.value(probe);
    probe[k] = lo;
    double down = custom.value(probe);
    probe[k] = saved;
    g.values[k] = (up - down) / (saved + h - lo);
    if (lo == 0.0 && saved < h) {
      g.boundary = true;
    }
  }
  return g;
}

}  // namespace effective_trade
