// Copyright 2026 The Pooling Network Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pooling/error.hpp"
#include "pooling/model.hpp"

namespace pooling {

enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

inline const char* ToString(LPStatus s) {
  switch (s) {
    case LPStatus::kOptimal: return "optimal";
    case LPStatus::kInfeasible: return "infeasible";
    case LPStatus::kUnbounded: return "unbounded";
  }
  return "?";
}

struct LPResult {
  LPStatus status = LPStatus::kInfeasible;
  double objective = kInf;
  Point values;  // one entry per model variable
  std::size_t iterations = 0;
};

struct LPOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  // Sum of artificials above this (in scaled row units) means infeasible.
  double infeasibility_tol = 1e-7;
  std::size_t max_iterations = 0;  // 0: 100 * (rows + columns) + 10000
};

namespace detail {

// Dense-tableau bounded-variable primal simplex, two phases with one
// artificial per initially violated row. Dantzig pricing with a Harris ratio
// test; switches to Bland's rule after 5*(m+n) consecutive degenerate pivots.
class BoundedSimplex {
 public:
  BoundedSimplex(const Model& model, const LPOptions& options)
      : model_(model), opt_(options) {}

  LPResult Solve() {
    LPResult result;
    result.values.assign(model_.num_variables(), 0.0);
    if (!Setup()) {
      result.status = LPStatus::kInfeasible;
      return result;
    }
    const std::size_t max_iter =
        opt_.max_iterations ? opt_.max_iterations : 100 * (m_ + n_) + 10000;

    if (num_art_ > 0) {
      SetPhaseOneCosts();
      const Outcome o = Iterate(max_iter);
      if (o == Outcome::kUnbounded) Fail("phase one reported unbounded");
      double infeas = 0.0;
      for (std::size_t a = art_begin_; a < cols_; ++a) infeas += x_[a];
      if (infeas > opt_.infeasibility_tol) {
        result.status = LPStatus::kInfeasible;
        result.iterations = iterations_;
        return result;
      }
      for (std::size_t a = art_begin_; a < cols_; ++a) upper_[a] = 0.0;
    }

    SetPhaseTwoCosts();
    for (int attempt = 0;; ++attempt) {
      const Outcome o = Iterate(max_iter);
      if (o == Outcome::kUnbounded) {
        result.status = LPStatus::kUnbounded;
        result.objective = -kInf;
        result.iterations = iterations_;
        Extract(result.values);
        return result;
      }
      if (Verified()) break;
      if (attempt >= 2) Fail("could not reach a verified optimum");
      Refactor();
    }
    result.status = LPStatus::kOptimal;
    result.iterations = iterations_;
    Extract(result.values);
    result.objective = ObjectiveValue(model_, result.values);
    return result;
  }

 private:
  enum class Outcome { kOptimal, kUnbounded };

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kNumericalFailure, "simplex: " + what + " after " +
                                                  std::to_string(iterations_) + " iterations");
  }

  double& T(std::size_t row, std::size_t col) { return tableau_[row * cols_ + col]; }

  // Returns false when a constant row is already violated.
  bool Setup() {
    const std::size_t nvar = model_.num_variables();
    structural_of_var_.assign(nvar, kNone);
    fixed_value_.assign(nvar, 0.0);
    for (std::size_t j = 0; j < nvar; ++j) {
      const Variable& v = model_.variables()[j];
      if (v.lower > v.upper) return false;
      if (v.lower == v.upper) {
        fixed_value_[j] = v.lower;
      } else {
        structural_of_var_[j] = var_of_structural_.size();
        var_of_structural_.push_back(j);
      }
    }
    n_ = var_of_structural_.size();

    // Collect active rows, folding fixed variables into the right-hand side.
    struct Row {
      std::vector<std::pair<std::size_t, double>> terms;
      double rhs;
      Sense sense;
    };
    std::vector<Row> rows;
    for (const auto& c : model_.constraints()) {
      if (!c.active) continue;
      if (!c.bilinear.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "solve_lp: constraint '" + c.name + "' is bilinear");
      }
      Row row{{}, c.rhs - c.linear.constant(), c.sense};
      for (const auto& [var, coef] : c.linear.terms()) {
        const std::size_t s = structural_of_var_[var.value];
        if (s == kNone) {
          row.rhs -= coef * fixed_value_[var.value];
        } else {
          row.terms.emplace_back(s, coef);
        }
      }
      if (row.terms.empty()) {
        const double tol = 1e-9 * (1.0 + std::abs(row.rhs));
        const bool ok = (row.sense == Sense::kLessEqual && 0.0 <= row.rhs + tol) ||
                        (row.sense == Sense::kGreaterEqual && 0.0 >= row.rhs - tol) ||
                        (row.sense == Sense::kEqual && std::abs(row.rhs) <= tol);
        if (!ok) return false;
        continue;
      }
      rows.push_back(std::move(row));
    }
    m_ = rows.size();

    // Row scaling by the largest coefficient.
    a_.assign(m_ * n_, 0.0);
    b_.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double scale = 0.0;
      for (const auto& [s, coef] : rows[i].terms) scale = std::max(scale, std::abs(coef));
      const double inv = 1.0 / scale;
      for (const auto& [s, coef] : rows[i].terms) a_[i * n_ + s] += coef * inv;
      b_[i] = rows[i].rhs * inv;
    }

    // Nonbasic structurals start at a finite bound (lower first) or 0.
    slack_begin_ = n_;
    art_begin_ = n_ + m_;
    lower_.assign(n_ + m_, 0.0);
    upper_.assign(n_ + m_, 0.0);
    x_.assign(n_ + m_, 0.0);
    for (std::size_t s = 0; s < n_; ++s) {
      const Variable& v = model_.variables()[var_of_structural_[s]];
      lower_[s] = v.lower;
      upper_[s] = v.upper;
      x_[s] = std::isfinite(v.lower) ? v.lower : (std::isfinite(v.upper) ? v.upper : 0.0);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t sl = slack_begin_ + i;
      switch (rows[i].sense) {
        case Sense::kLessEqual: lower_[sl] = 0.0; upper_[sl] = kInf; break;
        case Sense::kGreaterEqual: lower_[sl] = -kInf; upper_[sl] = 0.0; break;
        case Sense::kEqual: lower_[sl] = 0.0; upper_[sl] = 0.0; break;
      }
    }

    // Decide per row: basic slack, or slack at a bound plus an artificial.
    std::vector<double> residual(m_);
    std::vector<double> art_sign;
    std::vector<std::size_t> art_row;
    for (std::size_t i = 0; i < m_; ++i) {
      double r = b_[i];
      for (std::size_t s = 0; s < n_; ++s) r -= a_[i * n_ + s] * x_[s];
      const std::size_t sl = slack_begin_ + i;
      if (r >= lower_[sl] - opt_.primal_tol && r <= upper_[sl] + opt_.primal_tol) {
        x_[sl] = std::clamp(r, lower_[sl], upper_[sl]);
        residual[i] = 0.0;
      } else {
        x_[sl] = r < lower_[sl] ? lower_[sl] : upper_[sl];
        residual[i] = r - x_[sl];
        art_sign.push_back(residual[i] > 0 ? 1.0 : -1.0);
        art_row.push_back(i);
      }
    }
    num_art_ = art_row.size();
    cols_ = n_ + m_ + num_art_;
    lower_.resize(cols_, 0.0);
    upper_.resize(cols_, kInf);
    x_.resize(cols_, 0.0);
    art_sign_.assign(m_, 0.0);
    art_row_ = art_row;

    basis_.assign(m_, kNone);
    row_of_.assign(cols_, kNone);
    for (std::size_t i = 0; i < m_; ++i) basis_[i] = slack_begin_ + i;
    for (std::size_t a = 0; a < num_art_; ++a) {
      const std::size_t i = art_row[a];
      const std::size_t col = art_begin_ + a;
      art_sign_[i] = art_sign[a];
      basis_[i] = col;
      x_[col] = std::abs(residual[i]);
    }
    for (std::size_t i = 0; i < m_; ++i) row_of_[basis_[i]] = i;

    tableau_.assign(m_ * cols_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = art_sign_[i] != 0.0 ? art_sign_[i] : 1.0;
      for (std::size_t s = 0; s < n_; ++s) T(i, s) = sign * a_[i * n_ + s];
      T(i, slack_begin_ + i) = sign;
    }
    for (std::size_t a = 0; a < num_art_; ++a) T(art_row[a], art_begin_ + a) = 1.0;
    return true;
  }

  void SetPhaseOneCosts() {
    cost_.assign(cols_, 0.0);
    for (std::size_t a = art_begin_; a < cols_; ++a) cost_[a] = 1.0;
    ComputeReducedCosts();
  }

  void SetPhaseTwoCosts() {
    cost_.assign(cols_, 0.0);
    double scale = 0.0;
    for (const auto& [var, coef] : model_.objective().terms()) {
      const std::size_t s = structural_of_var_[var.value];
      if (s != kNone) scale = std::max(scale, std::abs(coef));
    }
    scale = scale > 0.0 ? 1.0 / scale : 1.0;
    for (const auto& [var, coef] : model_.objective().terms()) {
      const std::size_t s = structural_of_var_[var.value];
      if (s != kNone) cost_[s] = coef * scale;
    }
    ComputeReducedCosts();
    bland_ = false;
    degenerate_run_ = 0;
  }

  void ComputeReducedCosts() {
    d_ = cost_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tableau_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  bool IsFixed(std::size_t j) const { return lower_[j] == upper_[j]; }

  // Entering column and direction (+1 increase, -1 decrease), or kNone.
  std::size_t Price(double& dir) const {
    std::size_t best = kNone;
    double best_score = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (row_of_[j] != kNone || IsFixed(j)) continue;
      const double dj = d_[j];
      double step = 0.0;
      if (dj < -opt_.dual_tol && x_[j] < upper_[j]) {
        step = 1.0;
      } else if (dj > opt_.dual_tol && x_[j] > lower_[j]) {
        step = -1.0;
      } else {
        continue;
      }
      if (bland_) {
        dir = step;
        return j;
      }
      if (std::abs(dj) > best_score) {
        best_score = std::abs(dj);
        best = j;
        dir = step;
      }
    }
    return best;
  }

  Outcome Iterate(std::size_t max_iter) {
    for (;;) {
      if (++iterations_ > max_iter) Fail("iteration limit");
      double dir = 0.0;
      const std::size_t q = Price(dir);
      if (q == kNone) return Outcome::kOptimal;

      // Ratio test. Basic i moves by -T(i,q)*dir*theta.
      const double range = upper_[q] - lower_[q];
      double theta_max = kInf;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = T(i, q) * dir;
        const std::size_t bvar = basis_[i];
        if (a > opt_.pivot_tol && std::isfinite(lower_[bvar])) {
          theta_max = std::min(theta_max, (x_[bvar] - lower_[bvar] + opt_.primal_tol) / a);
        } else if (a < -opt_.pivot_tol && std::isfinite(upper_[bvar])) {
          theta_max = std::min(theta_max, (upper_[bvar] - x_[bvar] + opt_.primal_tol) / -a);
        }
      }
      std::size_t leave_row = kNone;
      double theta = kInf;
      if (bland_) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = T(i, q) * dir;
          const std::size_t bvar = basis_[i];
          double ratio = kInf;
          if (a > opt_.pivot_tol && std::isfinite(lower_[bvar])) {
            ratio = std::max(0.0, (x_[bvar] - lower_[bvar]) / a);
          } else if (a < -opt_.pivot_tol && std::isfinite(upper_[bvar])) {
            ratio = std::max(0.0, (upper_[bvar] - x_[bvar]) / -a);
          }
          if (ratio < theta || (ratio == theta && leave_row != kNone && bvar < basis_[leave_row])) {
            theta = ratio;
            leave_row = i;
          }
        }
      } else if (std::isfinite(theta_max)) {
        double best_pivot = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = T(i, q) * dir;
          const std::size_t bvar = basis_[i];
          double ratio = kInf;
          if (a > opt_.pivot_tol && std::isfinite(lower_[bvar])) {
            ratio = (x_[bvar] - lower_[bvar]) / a;
          } else if (a < -opt_.pivot_tol && std::isfinite(upper_[bvar])) {
            ratio = (upper_[bvar] - x_[bvar]) / -a;
          } else {
            continue;
          }
          if (ratio <= theta_max && std::abs(a) > best_pivot) {
            best_pivot = std::abs(a);
            leave_row = i;
            theta = std::max(0.0, ratio);
          }
        }
      }

      const bool flip = std::isfinite(range) && (leave_row == kNone || range <= theta);
      if (!flip && leave_row == kNone) return Outcome::kUnbounded;
      if (flip) theta = range;

      if (theta <= 1e-12) {
        if (++degenerate_run_ > 5 * (m_ + n_)) bland_ = true;
      } else {
        degenerate_run_ = 0;
      }

      // Move along the edge.
      const double step = dir * theta;
      if (step != 0.0) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = T(i, q);
          if (a != 0.0) x_[basis_[i]] -= a * step;
        }
      }
      if (flip) {
        x_[q] = dir > 0 ? upper_[q] : lower_[q];
        continue;
      }
      x_[q] += step;
      const std::size_t leaving = basis_[leave_row];
      const double a = T(leave_row, q) * dir;
      x_[leaving] = a > 0 ? lower_[leaving] : upper_[leaving];
      Pivot(leave_row, q);
    }
  }

  void Pivot(std::size_t r, std::size_t q) {
    double* prow = &tableau_[r * cols_];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    // Pivot rows are usually sparse, so eliminate over their nonzeros only.
    nz_.clear();
    for (std::size_t j = 0; j < cols_; ++j) {
      if (prow[j] != 0.0) nz_.push_back(j);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tableau_[i * cols_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (const std::size_t j : nz_) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (const std::size_t j : nz_) d_[j] -= f * prow[j];
    }
    d_[q] = 0.0;
    row_of_[basis_[r]] = kNone;
    basis_[r] = q;
    row_of_[q] = r;
  }

  // Column j of the scaled constraint matrix [A | I | artificials].
  double Column(std::size_t i, std::size_t j) const {
    if (j < n_) return a_[i * n_ + j];
    if (j < art_begin_) return (j - slack_begin_) == i ? 1.0 : 0.0;
    // Artificial columns carry the sign of their row.
    const std::size_t row = art_row_[j - art_begin_];
    return row == i ? art_sign_[row] : 0.0;
  }

  // Rebuilds the tableau, basic values and reduced costs from scratch.
  void Refactor() {
    const Eigen::Index m = static_cast<Eigen::Index>(m_);
    Eigen::MatrixXd basis(m, m);
    Eigen::MatrixXd full(m, static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) full(i, j) = Column(i, j);
    }
    for (std::size_t i = 0; i < m_; ++i) basis.col(i) = full.col(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    Eigen::MatrixXd t = lu.solve(full);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) T(i, j) = t(i, j);
    }
    Eigen::VectorXd rhs(m);
    for (std::size_t i = 0; i < m_; ++i) {
      double r = b_[i];
      for (std::size_t j = 0; j < cols_; ++j) {
        if (row_of_[j] == kNone && x_[j] != 0.0) r -= Column(i, j) * x_[j];
      }
      rhs(i) = r;
    }
    Eigen::VectorXd xb = lu.solve(rhs);
    for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = xb(i);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t bv = basis_[i];
      if (x_[bv] < lower_[bv] - 1e-7 || x_[bv] > upper_[bv] + 1e-7) {
        Fail("basis lost primal feasibility after refactorization");
      }
      x_[bv] = std::clamp(x_[bv], lower_[bv], upper_[bv]);
    }
    ComputeReducedCosts();
  }

  // Checks primal feasibility on the original rows and dual feasibility
  // against reduced costs recomputed from the original data.
  bool Verified() {
    for (std::size_t i = 0; i < m_; ++i) {
      double lhs = 0.0;
      for (std::size_t s = 0; s < n_; ++s) lhs += a_[i * n_ + s] * x_[s];
      const double slack = b_[i] - lhs;
      const std::size_t sl = slack_begin_ + i;
      if (slack < lower_[sl] - 1e-8 || slack > upper_[sl] + 1e-8) return false;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (x_[j] < lower_[j] - 1e-9 || x_[j] > upper_[j] + 1e-9) return false;
    }
    // Duals from the slack block: d_slack_i = -y_i.
    std::vector<double> y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[i] = -d_[slack_begin_ + i];
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (row_of_[j] != kNone || IsFixed(j)) continue;
      double dj = cost_[j];
      if (j < n_) {
        for (std::size_t i = 0; i < m_; ++i) dj -= y[i] * a_[i * n_ + j];
      } else {
        dj -= y[j - slack_begin_];
      }
      const double tol = 1e-7;
      if (dj < -tol && x_[j] < upper_[j]) return false;
      if (dj > tol && x_[j] > lower_[j]) return false;
    }
    return true;
  }

  void Extract(Point& values) const {
    for (std::size_t j = 0; j < values.size(); ++j) {
      const std::size_t s = structural_of_var_[j];
      values[j] = s == kNone ? fixed_value_[j] : x_[s];
    }
  }

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  const Model& model_;
  LPOptions opt_;
  std::size_t n_ = 0, m_ = 0, cols_ = 0, num_art_ = 0;
  std::size_t slack_begin_ = 0, art_begin_ = 0;
  std::vector<std::size_t> structural_of_var_, var_of_structural_;
  std::vector<double> fixed_value_;
  std::vector<double> a_, b_;
  std::vector<double> lower_, upper_, x_, cost_, d_, art_sign_;
  std::vector<double> tableau_;
  std::vector<std::size_t> basis_, row_of_, art_row_;
  std::vector<std::size_t> nz_;
  std::size_t iterations_ = 0;
  std::size_t degenerate_run_ = 0;
  bool bland_ = false;
};

}  // namespace detail

// Solves a bilinear-free model; binaries are treated as continuous.
inline LPResult solve_lp(const Model& model, const LPOptions& options = {}) {
  return detail::BoundedSimplex(model, options).Solve();
}

}  // namespace pooling
