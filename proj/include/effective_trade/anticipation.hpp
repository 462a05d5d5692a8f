#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <type_traits>
#include <utility>
#include <vector>

#include "effective_trade/error.hpp"

namespace effective_trade {

/// Probability masses within this of the maximum count as tied.
inline constexpr double kModeTieTolerance = 1e-12;

/// Image values: exact equality by default, 1e-9 for reals and real vectors.
template <class T>
struct ImageEquality {
  bool operator()(const T& a, const T& b) const { return a == b; }
};

template <>
struct ImageEquality<double> {
  bool operator()(double a, double b) const { return std::abs(a - b) <= 1e-9; }
};

template <>
struct ImageEquality<std::vector<double>> {
  bool operator()(const std::vector<double>& a,
                  const std::vector<double>& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::abs(a[k] - b[k]) > 1e-9) return false;
    }
    return true;
  }
};

template <class Outcome>
struct FiniteBelief {
  std::vector<Outcome> support;
  std::vector<double> probabilities;

  /// Throws ContractViolation if the belief is malformed.
  void validate() const {
    if (support.empty()) {
      throw ContractViolation("belief: empty support");
    }
    if (support.size() != probabilities.size()) {
      throw ContractViolation("belief: support/probability length mismatch");
    }
    double total = 0.0;
    for (double p : probabilities) {
      if (!(p >= 0.0)) {
        throw ContractViolation("belief: negative probability");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw ContractViolation("belief: probabilities do not sum to 1");
    }
    ImageEquality<Outcome> eq;
    for (std::size_t a = 0; a < support.size(); ++a) {
      for (std::size_t b = a + 1; b < support.size(); ++b) {
        if (eq(support[a], support[b])) {
          throw ContractViolation("belief: repeated support value");
        }
      }
    }
  }
};

template <class Signal>
struct Observation {
  std::int64_t t = 0;
  Signal signal;
};

template <class Signal>
struct History {
  std::vector<Observation<Signal>> observations;
  /// Memory length; observations older than now - window are forgotten.
  std::int64_t window = 1;
  std::int64_t now = 0;
};

/// Modal values of f(y) under the belief, in order of first appearance.
template <class Outcome, class F>
auto pushforward_mode(const FiniteBelief<Outcome>& belief, F&& f) {
  using Value = std::decay_t<std::invoke_result_t<F&, const Outcome&>>;
  if (belief.support.empty()) {
    throw ContractViolation("pushforward_mode: empty support");
  }
  if (belief.support.size() != belief.probabilities.size()) {
    throw ContractViolation("pushforward_mode: length mismatch");
  }
  ImageEquality<Value> eq;
  std::vector<Value> values;
  std::vector<double> mass;
  for (std::size_t s = 0; s < belief.support.size(); ++s) {
    Value v = f(belief.support[s]);
    std::size_t g = 0;
    while (g < values.size() && !eq(values[g], v)) {
      ++g;
    }
    if (g == values.size()) {
      values.push_back(std::move(v));
      mass.push_back(0.0);
    }
    mass[g] += belief.probabilities[s];
  }
  double top = 0.0;
  for (double m : mass) {
    top = std::max(top, m);
  }
  std::vector<Value> modes;
  for (std::size_t g = 0; g < values.size(); ++g) {
    if (mass[g] >= top - kModeTieTolerance) {
      modes.push_back(values[g]);
    }
  }
  return modes;
}

template <class Outcome>
std::vector<Outcome> mode(const FiniteBelief<Outcome>& belief) {
  return pushforward_mode(belief, [](const Outcome& y) { return y; });
}

/**
 * Belief restricted to outcomes compatible with every observation inside
 * [now - window, now], renormalized. Throws if nothing survives.
 */
template <class Outcome, class Signal, class Compatible>
FiniteBelief<Outcome> condition(const FiniteBelief<Outcome>& belief,
                                const History<Signal>& history,
                                Compatible&& compatible) {
  if (history.window < 1) {
    throw ContractViolation("history: window must be >= 1");
  }
  FiniteBelief<Outcome> out;
  double total = 0.0;
  for (std::size_t s = 0; s < belief.support.size(); ++s) {
    bool keep = true;
    for (const auto& obs : history.observations) {
      if (obs.t < history.now - history.window || obs.t > history.now) {
        continue;
      }
      if (!compatible(belief.support[s], obs.signal)) {
        keep = false;
        break;
      }
    }
    if (keep && belief.probabilities[s] > 0.0) {
      out.support.push_back(belief.support[s]);
      out.probabilities.push_back(belief.probabilities[s]);
      total += belief.probabilities[s];
    }
  }
  if (out.support.empty() || total <= 0.0) {
    throw ContractViolation("conditional_mode: belief contradicted by history");
  }
  for (double& p : out.probabilities) {
    p /= total;
  }
  return out;
}

template <class Outcome, class Signal, class Compatible, class F>
auto conditional_mode(const FiniteBelief<Outcome>& belief,
                      const History<Signal>& history, Compatible&& compatible,
                      F&& f) {
  return pushforward_mode(
      condition(belief, history, std::forward<Compatible>(compatible)),
      std::forward<F>(f));
}

template <class Outcome, class Signal, class Compatible>
std::vector<Outcome> conditional_mode(const FiniteBelief<Outcome>& belief,
                                      const History<Signal>& history,
                                      Compatible&& compatible) {
  return mode(condition(belief, history, std::forward<Compatible>(compatible)));
}

}  // namespace effective_trade
