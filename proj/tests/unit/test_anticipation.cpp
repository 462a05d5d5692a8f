#include <random>
#include <string>

#include <gtest/gtest.h>

#include "effective_trade/anticipation.hpp"
#include "oracles.hpp"

using namespace effective_trade;

namespace {

struct RandomBelief {
  FiniteBelief<int> belief;
  std::vector<long> weights;
};

RandomBelief draw(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 20), weight(0, 6);
  RandomBelief rb;
  int n = size(rng);
  long total = 0;
  for (int s = 0; s < n; ++s) {
    rb.belief.support.push_back(s * 7 + 3);
    long w = weight(rng);
    rb.weights.push_back(w);
    total += w;
  }
  if (total == 0) {
    rb.weights[0] = 1;
    total = 1;
  }
  for (long w : rb.weights) rb.belief.probabilities.push_back(static_cast<double>(w) / total);
  return rb;
}

}  // namespace

TEST(Mode, PushforwardAgreesWithIntegerMassesOnRandomBeliefs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    auto rb = draw(rng);
    int buckets = 1 + trial % 5;
    auto f = [buckets](int y) { return y % buckets; };
    std::vector<int> images;
    for (int y : rb.belief.support) images.push_back(f(y));
    ASSERT_EQ(pushforward_mode(rb.belief, f), oracle::integer_mode(images, rb.weights))
        << "trial " << trial;
    ASSERT_EQ(mode(rb.belief), oracle::integer_mode(rb.belief.support, rb.weights));
  }
}

TEST(Mode, ConditionalAgreesWithFilteredIntegerMasses) {
  std::mt19937_64 rng(23);
  std::bernoulli_distribution keep(0.6);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto rb = draw(rng);
    History<std::vector<int>> h;
    h.now = 10;
    h.window = 3;
    for (std::int64_t t : {5, 8, 10}) {
      Observation<std::vector<int>> o;
      o.t = t;
      for (int y : rb.belief.support)
        if (keep(rng)) o.signal.push_back(y);
      h.observations.push_back(o);
    }
    auto compatible = [](int y, const std::vector<int>& allowed) {
      return std::find(allowed.begin(), allowed.end(), y) != allowed.end();
    };
    std::vector<int> images;
    std::vector<long> weights;
    for (std::size_t s = 0; s < rb.belief.support.size(); ++s) {
      int y = rb.belief.support[s];
      // t = 5 is outside [now - window, now].
      if (compatible(y, h.observations[1].signal) && compatible(y, h.observations[2].signal) &&
          rb.weights[s] > 0) {
        images.push_back(y % 3);
        weights.push_back(rb.weights[s]);
      }
    }
    auto f = [](int y) { return y % 3; };
    if (images.empty()) {
      EXPECT_THROW(conditional_mode(rb.belief, h, compatible, f), ContractViolation);
      continue;
    }
    ASSERT_EQ(conditional_mode(rb.belief, h, compatible, f), oracle::integer_mode(images, weights))
        << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(Mode, TiesAreReturnedTogether) {
  FiniteBelief<std::string> b{{"x", "y", "z"}, {0.4, 0.4, 0.2}};
  EXPECT_EQ(mode(b), (std::vector<std::string>{"x", "y"}));
}

TEST(Mode, RealImagesUseTolerance) {
  FiniteBelief<int> b{{1, 2, 3}, {0.3, 0.3, 0.4}};
  auto f = [](int y) { return y == 3 ? 0.5 : 0.1 * 3 + (y == 1 ? 1e-12 : 0.0); };
  auto m = pushforward_mode(b, f);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(m[0], 0.3, 1e-9);
}

TEST(Mode, MalformedBeliefsRejected) {
  EXPECT_THROW((FiniteBelief<int>{{1, 2}, {0.5, 0.6}}.validate()), ContractViolation);
  EXPECT_THROW((FiniteBelief<int>{{1, 1}, {0.5, 0.5}}.validate()), ContractViolation);
  EXPECT_THROW((FiniteBelief<int>{{}, {}}.validate()), ContractViolation);
}
