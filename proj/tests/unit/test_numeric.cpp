#include <random>

#include <gtest/gtest.h>

#include "effective_trade/numeric/linear_program.hpp"
#include "effective_trade/numeric/nnls.hpp"
#include "effective_trade/numeric/simplex_projection.hpp"

using namespace effective_trade::numeric;

TEST(SimplexProjection, MatchesBruteForceOnRandomVectors) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(3);
    for (double& x : v) x = g(rng);
    auto p = project_to_simplex(v);
    double sum = p[0] + p[1] + p[2];
    ASSERT_NEAR(sum, 1, 1e-12);
    double best = 1e300;
    // Grid search on the 3-simplex for the nearest point.
    const int N = 400;
    for (int a = 0; a <= N; ++a)
      for (int b = 0; a + b <= N; ++b) {
        double q[3] = {a / double(N), b / double(N), (N - a - b) / double(N)};
        double d = 0;
        for (int k = 0; k < 3; ++k) d += (q[k] - v[k]) * (q[k] - v[k]);
        best = std::min(best, d);
      }
    double dp = 0;
    for (int k = 0; k < 3; ++k) dp += (p[k] - v[k]) * (p[k] - v[k]);
    EXPECT_LE(dp, best + 1e-12);
  }
}

TEST(LinearProgram, SolvesSmallProblem) {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6
  std::vector<double> c{1, 1};
  std::vector<LinearConstraint> cons{{{1, 2}, Relation::less_equal, 4},
                                     {{3, 1}, Relation::less_equal, 6}};
  auto r = maximize(c, cons);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.objective, 2.8, 1e-9);
  EXPECT_NEAR(r.x[0], 1.6, 1e-9);
}

TEST(LinearProgram, DetectsInfeasibility) {
  std::vector<double> c{1};
  std::vector<LinearConstraint> cons{{{1}, Relation::equal, -1}};
  EXPECT_EQ(maximize(c, cons).status, LpStatus::infeasible);
}

TEST(Nnls, RecoversNonnegativeSolution) {
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd b(3);
  b << 1, -1, 0;
  auto r = nnls(A, b);
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.x.minCoeff(), 0);
  // Optimum over x >= 0 is x = (0.5, 0).
  EXPECT_NEAR(r.x(0), 0.5, 1e-12);
  EXPECT_NEAR(r.x(1), 0.0, 1e-12);
}

TEST(Nnls, ProjectionOntoPolyhedron) {
  // Project (2, 2) onto {x + y = 1, x >= 0, y >= 0}.
  Eigen::VectorXd c(2);
  c << 2, 2;
  Eigen::MatrixXd Aeq(1, 2);
  Aeq << 1, 1;
  Eigen::VectorXd beq(1);
  beq << 1;
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(2);
  auto p = project_to_polyhedron(c, Aeq, beq, G, h);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->point(0), 0.5, 1e-10);
  EXPECT_NEAR(p->point(1), 0.5, 1e-10);
}
