#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace effective_trade::numeric {

enum class Relation { less_equal, equal, greater_equal };

struct LinearConstraint {
  std::vector<double> coefficients;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

namespace detail {

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols)
      : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  Eigen::MatrixXd& data() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index r = 0; r < t_.rows(); ++r) {
      if (r != row && t_(r, col) != 0.0) {
        t_.row(r) -= t_(r, col) * t_.row(row);
      }
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Maximizes the objective stored in the last row as reduced costs
  // (row holds -c, so a negative entry means the column improves).
  // Bland's rule keeps it from cycling.
  LpStatus run(const std::vector<bool>& allowed, double eps) {
    const Eigen::Index obj = rows();
    for (int guard = 0; guard < 100000; ++guard) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < cols(); ++c) {
        if (allowed[static_cast<std::size_t>(c)] && t_(obj, c) < -eps) {
          enter = c;
          break;
        }
      }
      if (enter < 0) {
        return LpStatus::optimal;
      }
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index r = 0; r < rows(); ++r) {
        if (t_(r, enter) > eps) {
          double ratio = t_(r, cols()) / t_(r, enter);
          if (leave < 0 || ratio < best - 1e-12 ||
              (std::abs(ratio - best) <= 1e-12 &&
               basis_[static_cast<std::size_t>(r)] <
                   basis_[static_cast<std::size_t>(leave)])) {
            leave = r;
            best = ratio;
          }
        }
      }
      if (leave < 0) {
        return LpStatus::unbounded;
      }
      pivot(leave, enter);
    }
    return LpStatus::unbounded;
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

/**
 * Dense two-phase simplex: maximize c^T x subject to the constraints and
 * x >= 0. Meant for the small programs that show up here (tens of
 * variables), not for anything large.
 */
inline LpResult maximize(std::span<const double> objective,
                         std::span<const LinearConstraint> constraints,
                         double eps = 1e-10) {
  const auto n = static_cast<Eigen::Index>(objective.size());
  const auto m = static_cast<Eigen::Index>(constraints.size());

  // Normalize so every rhs is non-negative.
  std::vector<LinearConstraint> rows(constraints.begin(), constraints.end());
  for (auto& row : rows) {
    if (static_cast<Eigen::Index>(row.coefficients.size()) != n) {
      row.coefficients.resize(static_cast<std::size_t>(n), 0.0);
    }
    if (row.rhs < 0.0) {
      for (double& a : row.coefficients) {
        a = -a;
      }
      row.rhs = -row.rhs;
      if (row.relation == Relation::less_equal) {
        row.relation = Relation::greater_equal;
      } else if (row.relation == Relation::greater_equal) {
        row.relation = Relation::less_equal;
      }
    }
  }

  Eigen::Index slacks = 0;
  Eigen::Index artificials = 0;
  for (const auto& row : rows) {
    if (row.relation != Relation::equal) {
      ++slacks;
    }
    if (row.relation != Relation::less_equal) {
      ++artificials;
    }
  }

  const Eigen::Index total = n + slacks + artificials;
  detail::Tableau tab(m, total);
  auto& t = tab.data();

  Eigen::Index slack_col = n;
  Eigen::Index art_col = n + slacks;
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < n; ++c) {
      t(r, c) = row.coefficients[static_cast<std::size_t>(c)];
    }
    t(r, total) = row.rhs;
    if (row.relation == Relation::less_equal) {
      t(r, slack_col) = 1.0;
      tab.basis()[static_cast<std::size_t>(r)] = slack_col++;
    } else {
      if (row.relation == Relation::greater_equal) {
        t(r, slack_col++) = -1.0;
      }
      t(r, art_col) = 1.0;
      tab.basis()[static_cast<std::size_t>(r)] = art_col++;
    }
  }

  std::vector<bool> allowed(static_cast<std::size_t>(total), true);
  LpResult result;

  // Phase 1: maximize -(sum of artificials).
  if (artificials > 0) {
    t.row(m).setZero();
    for (Eigen::Index c = n + slacks; c < total; ++c) {
      t(m, c) = 1.0;
    }
    for (Eigen::Index r = 0; r < m; ++r) {
      if (tab.basis()[static_cast<std::size_t>(r)] >= n + slacks) {
        t.row(m) -= t.row(r);
      }
    }
    tab.run(allowed, eps);
    if (t(m, total) < -1e-9) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Drive any zero-level artificial out of the basis.
    for (Eigen::Index r = 0; r < m; ++r) {
      if (tab.basis()[static_cast<std::size_t>(r)] >= n + slacks) {
        for (Eigen::Index c = 0; c < n + slacks; ++c) {
          if (std::abs(t(r, c)) > 1e-9) {
            tab.pivot(r, c);
            break;
          }
        }
      }
    }
    for (Eigen::Index c = n + slacks; c < total; ++c) {
      allowed[static_cast<std::size_t>(c)] = false;
    }
  }

  // Phase 2.
  t.row(m).setZero();
  for (Eigen::Index c = 0; c < n; ++c) {
    t(m, c) = -objective[static_cast<std::size_t>(c)];
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    Eigen::Index b = tab.basis()[static_cast<std::size_t>(r)];
    if (b < n && objective[static_cast<std::size_t>(b)] != 0.0) {
      t.row(m) += objective[static_cast<std::size_t>(b)] * t.row(r);
    }
  }
  LpStatus status = tab.run(allowed, eps);
  if (status == LpStatus::unbounded) {
    result.status = status;
    return result;
  }

  result.status = LpStatus::optimal;
  result.x.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index r = 0; r < m; ++r) {
    Eigen::Index b = tab.basis()[static_cast<std::size_t>(r)];
    if (b < n) {
      result.x[static_cast<std::size_t>(b)] = t(r, total);
    }
  }
  result.objective = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    result.objective += objective[static_cast<std::size_t>(c)] *
                        result.x[static_cast<std::size_t>(c)];
  }
  return result;
}

}  // namespace effective_trade::numeric
