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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pooling/error.hpp"
#include "pooling/model.hpp"
#include "pooling/pooling_cuts.hpp"
#include "pooling/pq_formulation.hpp"
#include "pooling/relaxation.hpp"
#include "pooling/restriction.hpp"
#include "pooling/solve/gap.hpp"
#include "pooling/solve/lp_simplex.hpp"
#include "pooling/solve/primal_search.hpp"

namespace pooling {

enum class SolveStatus { kOptimal, kInfeasible, kTimeLimit, kNodeLimit, kError };

inline const char* ToString(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeLimit: return "time_limit";
    case SolveStatus::kNodeLimit: return "node_limit";
    case SolveStatus::kError: return "error";
  }
  return "?";
}

struct BranchAndCutOptions {
  bool use_pooling_cuts = true;
  bool use_primal_heuristic = true;
  std::size_t max_cut_rounds = 20;
  std::size_t max_cut_depth = 4;  // in-tree cut generation only up to this depth
  double cut_eps = 1e-5;
  PrimalSearchOptions primal_search;
  // Called after each root cut round with (round, LP bound, cuts added).
  std::function<void(std::size_t, double, std::size_t)> on_cut_round;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kError;
  std::optional<RestoredSolution> incumbent;
  double lower = -kInf;
  double upper = kInf;
  double rel_gap = kInf;
  std::size_t nodes = 0;
  std::size_t cuts = 0;
  double wall_seconds = 0.0;
  double root_bound = -kInf;    // LP bound after the root cut loop
  double heuristic_seconds = 0.0;
  double cut_seconds = 0.0;
  std::string message;          // set when status is kError
};

inline nlohmann::ordered_json report_json(const SolveReport& r) {
  auto num = [](double x) -> nlohmann::ordered_json {
    return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["status"] = ToString(r.status);
  j["lower"] = num(r.lower);
  j["upper"] = num(r.upper);
  j["rel_gap"] = num(r.rel_gap);
  j["nodes"] = r.nodes;
  j["cuts"] = r.cuts;
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

namespace detail {

class SpatialBranchAndCut {
 public:
  SpatialBranchAndCut(const PQModel& pq, const GapSpec& gap, const BranchAndCutOptions& options)
      : pq_(pq), gap_(gap), opt_(options), start_(Clock::now()) {}

  SolveReport Run() {
    gap_.validate();
    if (opt_.use_primal_heuristic) RunPrimalSearch();

    rm_ = relax(pq_.model);
    if (opt_.use_pooling_cuts) {
      const auto t0 = Clock::now();
      cuts_ = add_all_pooling_inequalities(rm_, pq_);
      report_.cut_seconds += Seconds(t0);
    }
    RootCutLoop();

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{-kInf, next_id_++, 0, {}});
    bool limit = false;
    while (!open.empty()) {
      const double bound = open.top().bound;
      if (Closed(bound)) break;
      if (Seconds(start_) > gap_.time_limit) {
        report_.status = SolveStatus::kTimeLimit;
        limit = true;
        break;
      }
      if (report_.nodes >= gap_.node_limit) {
        report_.status = SolveStatus::kNodeLimit;
        limit = true;
        break;
      }
      Node node = open.top();
      open.pop();
      ++report_.nodes;
      Process(std::move(node), open);
    }

    double lower = lost_bound_;
    if (!open.empty()) lower = std::min(lower, open.top().bound);
    if (incumbent_) lower = std::min(lower, incumbent_->objective);
    if (open.empty() && !incumbent_ && lost_bound_ == kInf) lower = kInf;
    report_.lower = lower;
    report_.upper = incumbent_ ? incumbent_->objective : kInf;
    report_.incumbent = incumbent_;
    report_.rel_gap = relative_gap(report_.lower, report_.upper);
    if (!limit) {
      if (incumbent_ && (lost_bound_ == kInf || gap_.closed(report_.lower, report_.upper))) {
        report_.status = SolveStatus::kOptimal;
      } else if (!incumbent_ && lost_bound_ == kInf) {
        report_.status = SolveStatus::kInfeasible;
        report_.rel_gap = 0.0;
      } else {
        report_.status = SolveStatus::kError;
        report_.message = "tree exhausted with unresolved nodes";
      }
    }
    report_.cuts = cuts_ ? cuts_->cut_rows.size() : 0;
    report_.wall_seconds = Seconds(start_);
    return report_;
  }

 private:
  using Clock = std::chrono::steady_clock;
  using Overrides = std::map<VarId, VarBounds>;

  struct Node {
    double bound;
    std::size_t id;
    std::size_t depth;
    Overrides bounds;
  };
  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };

  static double Seconds(Clock::time_point since) {
    return std::chrono::duration<double>(Clock::now() - since).count();
  }

  bool Closed(double bound) const {
    if (!incumbent_) return false;
    return bound >= incumbent_->objective - gap_.abs_tol || gap_.closed(bound, incumbent_->objective);
  }

  void Offer(std::optional<RestoredSolution> candidate) {
    if (!candidate) return;
    if (!incumbent_ || candidate->objective < incumbent_->objective) incumbent_ = std::move(candidate);
  }

  void RunPrimalSearch() {
    const auto t0 = Clock::now();
    PrimalSearchOptions ps = opt_.primal_search;
    ps.gap.time_limit = std::min(ps.gap.time_limit, gap_.time_limit);
    try {
      Offer(initial_primal_search(pq_, ps));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonLinearSideConstraints && e.code() != ErrorCode::kNumericalFailure) {
        throw;
      }
    }
    report_.heuristic_seconds += Seconds(t0);
  }

  void RootCutLoop() {
    for (std::size_t round = 0;; ++round) {
      const LPResult lp = solve_lp(rm_.lp);
      if (lp.status != LPStatus::kOptimal) return;
      report_.root_bound = lp.objective;
      if (!cuts_ || round >= opt_.max_cut_rounds) {
        if (opt_.on_cut_round) opt_.on_cut_round(round, lp.objective, 0);
        return;
      }
      const auto t0 = Clock::now();
      const std::size_t added = add_valid_cuts(*cuts_, rm_, lp.values, opt_.cut_eps);
      report_.cut_seconds += Seconds(t0);
      if (opt_.on_cut_round) opt_.on_cut_round(round, lp.objective, added);
      if (added == 0) return;
    }
  }

  // Incumbent candidates from a relaxation point: the point itself, the
  // point with v recomputed as q*y, and the flow LP at its q.
  void TryIncumbents(const Point& lp_point) {
    const auto t0 = Clock::now();
    const std::size_t n = pq_.model.num_variables();
    Point x(lp_point.begin(), lp_point.begin() + static_cast<std::ptrdiff_t>(n));
    auto check = [&](const Point& p) -> std::optional<RestoredSolution> {
      if (!is_feasible(pq_.model, p, kPqFeasibilityTol).feasible) return std::nullopt;
      return RestoredSolution{p, ObjectiveValue(pq_.model, p)};
    };
    Offer(check(x));
    Point y = x;
    for (const auto& [key, var] : pq_.v) {
      const auto& [i, l, j] = key;
      y[var.value] = x[pq_.q.at({i, l}).value] * x[pq_.y_pool.at({l, j}).value];
    }
    Offer(check(y));
    try {
      Offer(solve_fixed_q(pq_, x));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumericalFailure) throw;
    }
    report_.heuristic_seconds += Seconds(t0);
  }

  // Envelope over original variables with the largest |w - x*y|.
  std::optional<std::size_t> BranchEnvelope(const Point& x, const Model& lp) const {
    std::optional<std::size_t> best;
    double best_gap = 1e-6;
    for (std::size_t e = 0; e < rm_.envelopes.size(); ++e) {
      const EnvelopeEntry& entry = rm_.envelopes[e];
      if (entry.x.value >= rm_.num_original_variables || entry.y.value >= rm_.num_original_variables) {
        continue;
      }
      const Variable& vx = lp.variable(entry.x);
      const Variable& vy = lp.variable(entry.y);
      if (vx.upper - vx.lower < 1e-9 && vy.upper - vy.lower < 1e-9) continue;
      const double g = EnvelopeGap(entry, x);
      if (g > best_gap) {
        best_gap = g;
        best = e;
      }
    }
    return best;
  }

  void Process(Node node, std::priority_queue<Node, std::vector<Node>, NodeOrder>& open) {
    RelaxedModel local = rm_;
    RefreshBoundsInPlace(local, node.bounds);
    LPResult lp;
    try {
      lp = solve_lp(local.lp);
      if (lp.status == LPStatus::kOptimal && cuts_ && node.depth > 0 &&
          node.depth <= opt_.max_cut_depth) {
        for (std::size_t round = 0; round < opt_.max_cut_rounds; ++round) {
          const auto t0 = Clock::now();
          const std::size_t before = local.lp.num_constraints();
          const std::size_t added = add_valid_cuts(*cuts_, local, lp.values, opt_.cut_eps);
          for (std::size_t c = before; c < local.lp.num_constraints(); ++c) {
            rm_.lp.add_constraint(local.lp.constraints()[c]);
          }
          report_.cut_seconds += Seconds(t0);
          if (added == 0) break;
          lp = solve_lp(local.lp);
          if (lp.status != LPStatus::kOptimal) break;
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumericalFailure) throw;
      lost_bound_ = std::min(lost_bound_, node.bound);
      return;
    }
    if (lp.status == LPStatus::kInfeasible) return;
    if (lp.status == LPStatus::kUnbounded) {
      throw Error(ErrorCode::kNumericalFailure, "relaxation is unbounded");
    }
    const double bound = std::max(node.bound, lp.objective);
    if (Closed(bound)) return;
    TryIncumbents(lp.values);
    if (Closed(bound)) return;

    const std::optional<std::size_t> e = BranchEnvelope(lp.values, local.lp);
    if (!e) {
      // Relaxation point is feasible up to the envelope tolerance.
      if (!incumbent_ || incumbent_->objective > bound + gap_.abs_tol) {
        lost_bound_ = std::min(lost_bound_, bound);
      }
      return;
    }
    const EnvelopeEntry& entry = rm_.envelopes[*e];
    const Variable& vx = local.lp.variable(entry.x);
    const Variable& vy = local.lp.variable(entry.y);
    const bool use_x = vx.upper - vx.lower >= 1e-9;
    const VarId var = use_x ? entry.x : entry.y;
    const Variable& v = use_x ? vx : vy;
    const double width = v.upper - v.lower;
    const double point = std::clamp(lp.values[var.value], v.lower + 0.2 * width, v.upper - 0.2 * width);
    for (int side = 0; side < 2; ++side) {
      Node child{bound, next_id_++, node.depth + 1, node.bounds};
      VarBounds b{v.lower, v.upper};
      (side == 0 ? b.upper : b.lower) = point;
      child.bounds[var] = b;
      open.push(std::move(child));
    }
  }

  const PQModel& pq_;
  GapSpec gap_;
  BranchAndCutOptions opt_;
  Clock::time_point start_;
  RelaxedModel rm_;
  std::optional<CutBlock> cuts_;
  std::optional<RestoredSolution> incumbent_;
  double lost_bound_ = kInf;
  std::size_t next_id_ = 0;
  SolveReport report_;
};

}  // namespace detail

// Spatial branch and cut to global optimality over the McCormick relaxation,
// optionally strengthened with pooling inequalities and seeded by the
// restriction heuristic.
inline SolveReport branch_and_cut(const PQModel& pq, const GapSpec& gap = {},
                                  const BranchAndCutOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  try {
    return detail::SpatialBranchAndCut(pq, gap, options).Run();
  } catch (const Error& e) {
    SolveReport r;
    r.status = SolveStatus::kError;
    r.message = e.what();
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
}

}  // namespace pooling
