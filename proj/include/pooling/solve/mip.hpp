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

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "pooling/model.hpp"
#include "pooling/relaxation.hpp"
#include "pooling/solve/gap.hpp"
#include "pooling/solve/lp_simplex.hpp"

namespace pooling {

enum class MipStatus { kOptimal, kFeasible, kInfeasible, kNoFeasibleFound, kUnbounded };

inline const char* ToString(MipStatus s) {
  switch (s) {
    case MipStatus::kOptimal: return "optimal";
    case MipStatus::kFeasible: return "feasible";
    case MipStatus::kInfeasible: return "infeasible";
    case MipStatus::kNoFeasibleFound: return "no_feasible_found";
    case MipStatus::kUnbounded: return "unbounded";
  }
  return "?";
}

struct MipResult {
  MipStatus status = MipStatus::kNoFeasibleFound;
  double objective = kInf;  // incumbent
  double bound = -kInf;
  Point values;             // incumbent point, empty if none
  std::size_t nodes = 0;    // nodes branched on
  std::size_t lp_iterations = 0;

  bool has_incumbent() const { return !values.empty(); }
};

namespace detail {

inline constexpr double kIntegralityTol = 1e-6;

using BoundOverrides = std::vector<std::pair<VarId, VarBounds>>;

class BinaryBranchAndBound {
 public:
  BinaryBranchAndBound(const Model& model, const GapSpec& gap)
      : model_(model), gap_(gap), start_(std::chrono::steady_clock::now()) {
    for (std::size_t j = 0; j < model.num_variables(); ++j) {
      if (model.variables()[j].domain == Domain::kBinary) binaries_.push_back(VarId{j});
    }
  }

  MipResult Run() {
    gap_.validate();
    MipResult out;
    LPResult root = Solve({});
    if (root.status == LPStatus::kInfeasible) {
      out.status = MipStatus::kInfeasible;
      out.lp_iterations = iterations_;
      return out;
    }
    if (root.status == LPStatus::kUnbounded) {
      out.status = MipStatus::kUnbounded;
      out.lp_iterations = iterations_;
      return out;
    }
    Dive(root);

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{root.objective, next_id_++, {}});
    std::optional<LPResult> root_cache = std::move(root);
    double bound = -kInf;
    bool limit_hit = false;

    while (!open.empty()) {
      bound = open.top().bound;
      if (incumbent_value_ < kInf &&
          (bound >= incumbent_value_ - gap_.abs_tol || gap_.closed(bound, incumbent_value_))) {
        break;
      }
      if (Elapsed() > gap_.time_limit || out.nodes >= gap_.node_limit) {
        limit_hit = true;
        break;
      }
      Node node = open.top();
      open.pop();
      LPResult lp = root_cache ? std::move(*root_cache) : Solve(node.fixes);
      root_cache.reset();
      if (lp.status != LPStatus::kOptimal) continue;
      if (lp.objective >= incumbent_value_ - gap_.abs_tol) continue;

      const std::optional<VarId> frac = MostFractional(lp.values);
      if (!frac) {
        Offer(lp.values, node.fixes);
        continue;
      }
      ++out.nodes;
      for (double side : {0.0, 1.0}) {
        Node child{lp.objective, next_id_++, node.fixes};
        child.fixes.emplace_back(*frac, VarBounds{side, side});
        open.push(std::move(child));
      }
    }
    if (open.empty()) bound = incumbent_value_;
    if (incumbent_value_ < kInf) bound = std::min(bound, incumbent_value_);

    out.bound = bound;
    out.lp_iterations = iterations_;
    if (incumbent_value_ < kInf) {
      out.objective = incumbent_value_;
      out.values = incumbent_;
      out.status = limit_hit ? MipStatus::kFeasible : MipStatus::kOptimal;
    } else {
      out.status = limit_hit ? MipStatus::kNoFeasibleFound : MipStatus::kInfeasible;
    }
    return out;
  }

 private:
  struct Node {
    double bound;
    std::size_t id;
    BoundOverrides fixes;
  };
  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };

  double Elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  LPResult Solve(const BoundOverrides& fixes) {
    Model lp = model_;
    for (const auto& [var, b] : fixes) lp.set_bounds(var, b.lower, b.upper);
    LPResult r = solve_lp(lp);
    iterations_ += r.iterations;
    return r;
  }

  std::optional<VarId> MostFractional(const Point& x) const {
    std::optional<VarId> best;
    double best_frac = kIntegralityTol;
    for (VarId b : binaries_) {
      const double v = x[b.value];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac) {
        best_frac = frac;
        best = b;
      }
    }
    return best;
  }

  // Accepts an integral LP point after snapping binaries and re-solving the
  // continuous part, so stored incumbents are exactly integral.
  void Offer(const Point& x, BoundOverrides fixes) {
    for (VarId b : binaries_) {
      const double v = std::round(x[b.value]);
      fixes.emplace_back(b, VarBounds{v, v});
    }
    LPResult r = Solve(fixes);
    if (r.status != LPStatus::kOptimal) return;
    if (!is_feasible(model_, r.values, 1e-6).feasible) return;
    if (r.objective < incumbent_value_) {
      incumbent_value_ = r.objective;
      incumbent_ = std::move(r.values);
    }
  }

  // Rounding dive from the root: fix the largest fractional binary to 1
  // (or to 0 if that is infeasible) until the LP point is integral.
  void Dive(const LPResult& root) {
    BoundOverrides fixes;
    LPResult current = root;
    for (std::size_t depth = 0; depth <= binaries_.size(); ++depth) {
      if (Elapsed() > gap_.time_limit) return;
      std::optional<VarId> pick;
      double best = -1.0;
      for (VarId b : binaries_) {
        const double v = current.values[b.value];
        const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
        if (frac > kIntegralityTol && v > best) {
          best = v;
          pick = b;
        }
      }
      if (!pick) {
        Offer(current.values, fixes);
        return;
      }
      bool moved = false;
      for (double side : {1.0, 0.0}) {
        BoundOverrides trial = fixes;
        trial.emplace_back(*pick, VarBounds{side, side});
        LPResult r = Solve(trial);
        if (r.status == LPStatus::kOptimal) {
          fixes = std::move(trial);
          current = std::move(r);
          moved = true;
          break;
        }
      }
      if (!moved) return;
    }
  }

  const Model& model_;
  GapSpec gap_;
  std::chrono::steady_clock::time_point start_;
  std::vector<VarId> binaries_;
  double incumbent_value_ = kInf;
  Point incumbent_;
  std::size_t next_id_ = 0;
  std::size_t iterations_ = 0;
};

}  // namespace detail

// Best-first branch and bound over the binary variables of a bilinear-free
// model, with a rounding dive at the root.
inline MipResult solve_mip(const Model& model, const GapSpec& gap = {}) {
  if (model.has_bilinear_constraints() || !model.objective_bilinear().empty()) {
    throw Error(ErrorCode::kInvalidArgument, "solve_mip needs a bilinear-free model");
  }
  return detail::BinaryBranchAndBound(model, gap).Run();
}

}  // namespace pooling
