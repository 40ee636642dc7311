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
#include <cstddef>
#include <optional>
#include <set>
#include <string>

#include "pooling/error.hpp"
#include "pooling/model.hpp"
#include "pooling/pq_formulation.hpp"
#include "pooling/relaxation.hpp"
#include "pooling/restriction.hpp"
#include "pooling/solve/gap.hpp"
#include "pooling/solve/lp_simplex.hpp"
#include "pooling/solve/mip.hpp"

namespace pooling {

inline constexpr double kPqFeasibilityTol = 1e-6;

// Best flows for fixed pool compositions: q is taken from `point`, clamped
// and renormalized per pool, and the remaining linear program is solved.
// Returns a PQ-feasible assignment or nothing.
inline std::optional<RestoredSolution> solve_fixed_q(const PQModel& pq, const Point& point) {
  Model fixed = pq.model;
  const Network& net = pq.net();
  for (const auto& l : net.pools()) {
    const auto inputs = net.pool_inputs(l);
    double sum = 0.0;
    for (const auto& i : inputs) sum += std::clamp(point[pq.q.at({i, l}).value], 0.0, 1.0);
    for (const auto& i : inputs) {
      const VarId q = pq.q.at({i, l});
      const double value = sum > 1e-12 ? std::clamp(point[q.value], 0.0, 1.0) / sum
                                       : 1.0 / static_cast<double>(inputs.size());
      fixed.set_bounds(q, value, value);
    }
  }
  RelaxedModel lin = relax(fixed);
  const LPResult lp = solve_lp(lin.lp);
  if (lp.status != LPStatus::kOptimal) return std::nullopt;
  RestoredSolution out;
  out.values.assign(lp.values.begin(),
                    lp.values.begin() + static_cast<std::ptrdiff_t>(pq.model.num_variables()));
  if (!is_feasible(pq.model, out.values, kPqFeasibilityTol).feasible) return std::nullopt;
  out.objective = ObjectiveValue(pq.model, out.values);
  return out;
}

struct PrimalSearchOptions {
  std::size_t tau = 1;
  GapSpec gap{0.01, 1e-8, 60.0};
};

// Solves the pool-splitting MIP restriction and maps its solution back to
// PQ variables. Returns nothing when the restriction has no solution.
inline std::optional<RestoredSolution> initial_primal_search(const PQModel& pq,
                                                             const PrimalSearchOptions& options = {}) {
  std::set<std::string> core;
  for (const char* g : {groups::kPathDefinition, groups::kPqCut}) {
    for (const auto& name : pq.group(g)) core.insert(name);
  }
  for (const auto& c : pq.model.constraints()) {
    if (c.active && !c.bilinear.empty() && core.count(c.name) == 0) {
      throw Error(ErrorCode::kNonLinearSideConstraints,
                  "constraint '" + c.name + "' is bilinear outside the pooling core");
    }
  }
  if (!pq.model.objective_bilinear().empty()) {
    throw Error(ErrorCode::kNonLinearSideConstraints, "objective has bilinear terms");
  }

  RestrictionSpec spec;
  spec.tau = options.tau;
  RestrictedModel rm = install_restriction(pq, spec);
  const MipResult mip = solve_mip(rm.pq.model, options.gap);
  if (!mip.has_incumbent()) return std::nullopt;
  RestoredSolution restored = derive_fractional_flows(rm, mip.values);
  uninstall_restriction(rm);
  if (is_feasible(pq.model, restored.values, kPqFeasibilityTol).feasible) return restored;
  // Numerical drift in v = q*y: re-solve the flows at the derived q.
  return solve_fixed_q(pq, restored.values);
}

}  // namespace pooling
