#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace lpm {

enum class RowSense { LessEqual, GreaterEqual, Equal };

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  double infeasibility = 0.0;  // phase-one optimum (sum of artificials)
};

/// maximize c.x subject to rows (a_i . x  sense_i  b_i) and x >= 0.
///
/// Dense two-phase tableau simplex with Bland's rule; sized for the small
/// programs in this library (a few dozen rows and columns).
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_vars) : c_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_vars))) {}

  void set_objective(const Eigen::VectorXd& c) { c_ = c; }

  void add_row(const Eigen::VectorXd& a, RowSense sense, double b) { rows_.push_back({a, sense, b}); }

  [[nodiscard]] LpSolution solve(double feas_tol = 1e-9, double pivot_tol = 1e-12) const;

 private:
  struct Row {
    Eigen::VectorXd a;
    RowSense sense;
    double b;
  };

  Eigen::VectorXd c_;
  std::vector<Row> rows_;
};

namespace detail {

// Pivots on (r, col) and updates the basis.
inline void pivot(Eigen::MatrixXd& t, std::vector<Eigen::Index>& basis, Eigen::Index r, Eigen::Index col) {
  t.row(r) /= t(r, col);
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (i != r && t(i, col) != 0.0) t.row(i) -= t(i, col) * t.row(r);
  }
  basis[static_cast<std::size_t>(r)] = col;
}

// Runs simplex iterations on tableau `t` whose last row is the reduced-cost
// row of a maximization (entries > 0 improve). Only columns < `allowed` may
// enter. Returns false if unbounded.
inline bool run_simplex(Eigen::MatrixXd& t, std::vector<Eigen::Index>& basis, Eigen::Index allowed, double tol) {
  const Eigen::Index m = t.rows() - 1;
  const Eigen::Index rhs = t.cols() - 1;
  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < allowed; ++j) {
      if (t(m, j) > tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;
    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > tol) {
        const double ratio = t(i, rhs) / t(i, enter);
        if (ratio < best_ratio - tol ||
            (std::abs(ratio - best_ratio) <= tol && leave >= 0 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;
    pivot(t, basis, leave, enter);
  }
  return true;
}

}  // namespace detail

inline LpSolution LinearProgram::solve(double feas_tol, double pivot_tol) const {
  const auto n = c_.size();
  const auto m = static_cast<Eigen::Index>(rows_.size());

  Eigen::Index num_slack = 0;
  Eigen::Index num_art = 0;
  for (const auto& row : rows_) {
    const bool flip = row.b < 0.0;
    RowSense sense = row.sense;
    if (flip && sense != RowSense::Equal) sense = sense == RowSense::LessEqual ? RowSense::GreaterEqual : RowSense::LessEqual;
    if (sense != RowSense::Equal) ++num_slack;
    if (sense != RowSense::LessEqual) ++num_art;
  }

  // Columns: [x | slack/surplus | artificial | rhs]
  const Eigen::Index art0 = n + num_slack;
  const Eigen::Index cols = art0 + num_art + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));

  Eigen::Index slack = n;
  Eigen::Index art = art0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows_[static_cast<std::size_t>(i)];
    const double sign = row.b < 0.0 ? -1.0 : 1.0;
    RowSense sense = row.sense;
    if (sign < 0 && sense != RowSense::Equal) sense = sense == RowSense::LessEqual ? RowSense::GreaterEqual : RowSense::LessEqual;
    t.row(i).head(n) = sign * row.a.transpose();
    t(i, cols - 1) = sign * row.b;
    if (sense == RowSense::LessEqual) {
      t(i, slack) = 1.0;
      basis[static_cast<std::size_t>(i)] = slack++;
    } else {
      if (sense == RowSense::GreaterEqual) t(i, slack++) = -1.0;
      t(i, art) = 1.0;
      basis[static_cast<std::size_t>(i)] = art++;
    }
  }

  LpSolution sol;
  // Phase one: maximize -(sum of artificials).
  if (num_art > 0) {
    t.row(m).setZero();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] >= art0) t.row(m) += t.row(i);
    }
    t.row(m).segment(art0, num_art).setZero();
    detail::run_simplex(t, basis, art0, pivot_tol);
    sol.infeasibility = t(m, cols - 1);
    if (sol.infeasibility > feas_tol) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] < art0) continue;
      for (Eigen::Index j = 0; j < art0; ++j) {
        if (std::abs(t(i, j)) > pivot_tol) {
          detail::pivot(t, basis, i, j);
          break;
        }
      }
    }
  }

  // Phase two.
  t.row(m).setZero();
  t.row(m).head(n) = c_.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = basis[static_cast<std::size_t>(i)];
    if (b < n && c_(b) != 0.0) t.row(m) -= c_(b) * t.row(i);
  }
  if (!detail::run_simplex(t, basis, art0, pivot_tol)) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  sol.status = LpStatus::Optimal;
  sol.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = basis[static_cast<std::size_t>(i)];
    if (b < n) sol.x(b) = t(i, cols - 1);
  }
  sol.objective = c_.dot(sol.x);
  return sol;
}

}  // namespace lpm
