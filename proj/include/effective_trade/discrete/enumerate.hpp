#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "effective_trade/discrete/record.hpp"
#include "effective_trade/economy.hpp"
#include "effective_trade/error.hpp"
#include "effective_trade/price_polytope.hpp"

namespace effective_trade {

struct EnumerationOptions {
  /// Upper bound on every flow entry. Defaults to total endowment per good.
  std::optional<int> flow_bound;
  /// When false, an agent ships at most its own endowment of each good in
  /// total (no passing on goods received from others).
  bool allow_resale = false;
  /// Worker threads for the price checks; 1 keeps everything inline.
  unsigned threads = 1;
  bool with_dimension = true;
};

namespace detail {

inline int default_bound(const Economy& economy, std::size_t good) {
  double total = 0.0;
  for (const auto& a : economy.agents) {
    total += a.endowment[good];
  }
  return static_cast<int>(std::llround(total));
}

/// All per-good flow patterns (entries in table pair order) that pass the
/// bound, capacity, no-bidirectional, resale and holding-bound filters.
inline std::vector<std::vector<int>> good_patterns(
    const Economy& economy, std::size_t good, int bound, bool allow_resale) {
  const std::size_t n = economy.size();
  const auto pairs = pair_order(n);
  const std::size_t half = pairs.size() / 2;
  std::vector<std::vector<int>> out;
  std::vector<int> current(pairs.size(), 0);
  std::vector<double> shipped(n, 0.0);
  std::vector<double> net(n, 0.0);

  auto check_holdings = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      double x = economy.agents[i].endowment[good] + net[i];
      const auto& set = economy.agents[i].consumption;
      if (x < set.lower_bound(good) - 1e-9 || x > set.upper_bound(good) + 1e-9) {
        return false;
      }
    }
    return true;
  };

  auto recurse = [&](auto&& self, std::size_t m) -> void {
    if (m == pairs.size()) {
      if (check_holdings()) {
        out.push_back(current);
      }
      return;
    }
    auto [i, j] = pairs[m];
    double cap = economy.capacity(i, j, good);
    int top = bound;
    if (std::isfinite(cap)) {
      top = std::min(top, static_cast<int>(std::floor(cap + 1e-9)));
    }
    if (m >= half && current[m - half] > 0) {
      top = 0;  // reverse direction already carries this good
    }
    if (!allow_resale) {
      double room = economy.agents[i].endowment[good] - shipped[i];
      top = std::min(top, static_cast<int>(std::floor(room + 1e-9)));
    }
    for (int v = 0; v <= top; ++v) {
      current[m] = v;
      shipped[i] += v;
      net[i] -= v;
      net[j] += v;
      self(self, m + 1);
      shipped[i] -= v;
      net[i] += v;
      net[j] -= v;
    }
    current[m] = 0;
  };
  if (n == 1) {
    if (check_holdings()) {
      out.push_back({});
    }
    return out;
  }
  recurse(recurse, 0);
  return out;
}

}  // namespace detail

/**
 * Streams every feasible integer flow tensor, in lexicographic order of the
 * flattened tensor (good 0 first, table pair order within a good).
 */
template <class Sink>
void enumerate_feasible(const Economy& economy,
                        const EnumerationOptions& options, Sink&& sink) {
  economy.validate();
  if (economy.mode != Mode::discrete) {
    throw ContractViolation("enumerate_feasible: economy must be discrete");
  }
  if (options.flow_bound && *options.flow_bound < 1) {
    throw ContractViolation("enumerate_feasible: flow bound must be >= 1");
  }
  for (const auto& a : economy.agents) {
    for (double w : a.endowment) {
      if (w != std::floor(w)) {
        throw ContractViolation("enumerate_feasible: endowment of " + a.name +
                                " is not integral");
      }
    }
  }

  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;
  const auto pairs = pair_order(n);

  std::vector<std::vector<std::vector<int>>> patterns(L);
  for (std::size_t k = 0; k < L; ++k) {
    int bound = options.flow_bound ? *options.flow_bound
                                   : std::max(1, detail::default_bound(economy, k));
    patterns[k] = detail::good_patterns(economy, k, bound, options.allow_resale);
    if (patterns[k].empty()) {
      return;
    }
  }

  auto build = [&](const std::vector<std::size_t>& choice) {
    FlowTensor q(n, L);
    for (std::size_t k = 0; k < L; ++k) {
      const auto& v = patterns[k][choice[k]];
      for (std::size_t m = 0; m < pairs.size(); ++m) {
        q(pairs[m].first, pairs[m].second, k) = v[m];
      }
    }
    return q;
  };

  auto evaluate = [&](const std::vector<std::size_t>& choice)
      -> std::optional<EquilibriumRecord> {
    FlowTensor q = build(choice);
    auto witness = price_feasibility_solve(q, options.with_dimension);
    if (!witness) {
      return std::nullopt;
    }
    return make_record(economy, std::move(q), *witness);
  };

  // Odometer over the per-good pattern lists, good 0 most significant.
  auto advance = [&](std::vector<std::size_t>& choice) {
    for (std::size_t k = L; k-- > 0;) {
      if (++choice[k] < patterns[k].size()) {
        return true;
      }
      choice[k] = 0;
    }
    return false;
  };

  if (options.threads <= 1) {
    std::vector<std::size_t> choice(L, 0);
    do {
      if (auto r = evaluate(choice)) {
        sink(std::move(*r));
      }
    } while (advance(choice));
    return;
  }

  // Partition on the first good's pattern; merge in order.
  const std::size_t blocks = patterns[0].size();
  std::vector<std::vector<EquilibriumRecord>> results(blocks);
  auto work = [&](std::size_t first, std::size_t last) {
    for (std::size_t b = first; b < last; ++b) {
      std::vector<std::size_t> choice(L, 0);
      choice[0] = b;
      do {
        if (auto r = evaluate(choice)) {
          results[b].push_back(std::move(*r));
        }
        if (L == 1) {
          break;
        }
        std::size_t k = L;
        bool more = false;
        while (k-- > 1) {
          if (++choice[k] < patterns[k].size()) {
            more = true;
            break;
          }
          choice[k] = 0;
        }
        if (!more) {
          break;
        }
      } while (true);
    }
  };
  const std::size_t workers = std::min<std::size_t>(options.threads, blocks);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t first = blocks * w / workers;
    std::size_t last = blocks * (w + 1) / workers;
    pool.emplace_back(work, first, last);
  }
  for (auto& t : pool) {
    t.join();
  }
  for (auto& block : results) {
    for (auto& r : block) {
      sink(std::move(r));
    }
  }
}

inline std::vector<EquilibriumRecord> enumerate_feasible(
    const Economy& economy, const EnumerationOptions& options = {}) {
  std::vector<EquilibriumRecord> out;
  enumerate_feasible(economy, options,
                     [&](EquilibriumRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

}  // namespace effective_trade
