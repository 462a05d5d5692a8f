#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace effective_trade::numeric {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  bool converged = true;
};

/**
 * Lawson-Hanson active set solver for min ||A x - b|| subject to x >= 0.
 *
 * @param max_iterations Outer iteration cap. Defaults to 3 * cols.
 */
inline NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       int max_iterations = -1) {
  const Eigen::Index n = A.cols();
  if (max_iterations < 0) {
    max_iterations = static_cast<int>(3 * n + 10);
  }

  NnlsResult result;
  result.x = Eigen::VectorXd::Zero(n);
  if (n == 0) {
    result.residual_norm = b.norm();
    return result;
  }

  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     A.norm() * static_cast<double>(std::max(A.rows(), n));

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd& x = result.x;

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) {
        idx.push_back(j);
      }
    }
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
      Ap.col(static_cast<Eigen::Index>(c)) = A.col(idx[c]);
    }
    Eigen::VectorXd zp = Ap.completeOrthogonalDecomposition().solve(b);
    z = Eigen::VectorXd::Zero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) {
      z[idx[c]] = zp[static_cast<Eigen::Index>(c)];
    }
  };

  int iteration = 0;
  Eigen::VectorXd w = A.transpose() * (b - A * x);
  while (true) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) {
      break;
    }
    if (++iteration > max_iterations) {
      result.converged = false;
      break;
    }
    passive[static_cast<std::size_t>(best)] = true;

    Eigen::VectorXd z;
    solve_passive(z);
    int inner = 0;
    while (true) {
      bool all_positive = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          all_positive = false;
          break;
        }
      }
      if (all_positive) {
        break;
      }
      if (++inner > 3 * n + 10) {
        result.converged = false;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          double denominator = x[j] - z[j];
          alpha = std::min(alpha, denominator > 0.0 ? x[j] / denominator : 0.0);
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && std::abs(x[j]) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
      solve_passive(z);
    }
    x = z;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)]) {
        x[j] = 0.0;
      }
    }
    w = A.transpose() * (b - A * x);
  }

  result.residual_norm = (A * x - b).norm();
  return result;
}

/**
 * Least distance programming: min ||y|| subject to G y >= h.
 *
 * Returns nullopt when the constraints are infeasible.
 */
inline std::optional<Eigen::VectorXd> least_distance(const Eigen::MatrixXd& G,
                                                     const Eigen::VectorXd& h,
                                                     int max_iterations = -1,
                                                     bool* converged = nullptr) {
  const Eigen::Index m = G.rows();
  const Eigen::Index n = G.cols();
  if (m == 0) {
    return Eigen::VectorXd::Zero(n);
  }
  Eigen::MatrixXd E(n + 1, m);
  E.topRows(n) = G.transpose();
  E.row(n) = h.transpose();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n + 1);
  f[n] = 1.0;

  NnlsResult u = nnls(E, f, max_iterations);
  if (converged) {
    *converged = u.converged;
  }
  Eigen::VectorXd r = E * u.x - f;
  if (r.norm() < 1e-12 || std::abs(r[n]) < 1e-14) {
    return std::nullopt;
  }
  return Eigen::VectorXd(-r.head(n) / r[n]);
}

struct PolyhedronProjection {
  Eigen::VectorXd point;
  /// Worst violation of the equality and inequality constraints.
  double residual = 0.0;
  bool converged = true;
};

/**
 * Euclidean projection of c onto {x : Aeq x = beq, G x >= h}.
 *
 * Works in the null space of Aeq and hands the rest to least_distance.
 */
inline std::optional<PolyhedronProjection> project_to_polyhedron(
    const Eigen::VectorXd& c, const Eigen::MatrixXd& Aeq,
    const Eigen::VectorXd& beq, const Eigen::MatrixXd& G,
    const Eigen::VectorXd& h, double equality_tolerance = 1e-9,
    int max_iterations = -1) {
  const Eigen::Index n = c.size();
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n);

  if (Aeq.rows() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aeq,
                                          Eigen::ComputeFullV | Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    double cutoff = 1e-10 * std::max(1.0, s.size() > 0 ? s[0] : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      if (s[k] > cutoff) {
        ++rank;
      }
    }
    Eigen::VectorXd utb = svd.matrixU().transpose() * beq;
    for (Eigen::Index k = 0; k < rank; ++k) {
      x0 += svd.matrixV().col(k) * (utb[k] / s[k]);
    }
    if ((Aeq * x0 - beq).cwiseAbs().maxCoeff() > equality_tolerance) {
      return std::nullopt;
    }
    N = svd.matrixV().rightCols(n - rank);
  }

  Eigen::VectorXd zc = N.transpose() * (c - x0);
  Eigen::VectorXd base = x0 + N * zc;
  Eigen::VectorXd x = base;
  bool converged = true;
  if (G.rows() > 0) {
    auto y = least_distance(G * N, h - G * base, max_iterations, &converged);
    if (!y) {
      return std::nullopt;
    }
    x = base + N * *y;
  }

  PolyhedronProjection out;
  out.point = x;
  out.converged = converged;
  double worst = 0.0;
  if (Aeq.rows() > 0) {
    worst = std::max(worst, (Aeq * x - beq).cwiseAbs().maxCoeff());
  }
  if (G.rows() > 0) {
    worst = std::max(worst, (h - G * x).cwiseMax(0.0).maxCoeff());
  }
  out.residual = worst;
  return out;
}

}  // namespace effective_trade::numeric
