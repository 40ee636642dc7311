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

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pooling/error.hpp"
#include "pooling/model.hpp"
#include "pooling/pq_formulation.hpp"

namespace pooling {

// Pool splitting: tau copies per pool, copy t of pool l receives the share
// gamma(l, t) of every input's flow into l.
struct RestrictionSpec {
  std::size_t tau = 1;
  std::function<double(const std::string& l, std::size_t t)> gamma;  // empty: 1/tau

  double weight(const std::string& l, std::size_t t) const {
    return gamma ? gamma(l, t) : 1.0 / static_cast<double>(tau);
  }

  void validate(const Network& net) const {
    if (tau == 0) throw Error(ErrorCode::kInvalidWeights, "tau must be positive");
    for (const auto& l : net.pools()) {
      double sum = 0.0;
      for (std::size_t t = 0; t < tau; ++t) {
        const double g = weight(l, t);
        if (!(g >= 0.0)) {
          throw Error(ErrorCode::kInvalidWeights, "negative weight for pool '" + l + "'");
        }
        sum += g;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::kInvalidWeights,
                    "weights of pool '" + l + "' sum to " + std::to_string(sum));
      }
    }
  }
};

namespace groups {
inline constexpr const char* kFlowBalance = "flow_balance";
inline constexpr const char* kFlowBalance2 = "flow_balance_2";
inline constexpr const char* kFlowChoiceLimit = "flow_choice_limit";
inline constexpr const char* kFlowChoice = "flow_choice";
}  // namespace groups

// A PQ model with the restriction sub-block appended.
struct RestrictedModel {
  PQModel pq;
  std::size_t tau = 0;
  bool installed = false;
  std::map<std::tuple<std::string, std::string, std::size_t, std::string>, VarId> w;  // (i,l,t,j)
  std::map<std::tuple<std::string, std::size_t, std::string>, VarId> zeta;            // (l,t,j)
  std::size_t base_variables = 0;
  std::size_t base_constraints = 0;
  std::map<std::string, bool> saved_active;
};

namespace detail {

inline bool HasRestriction(const Model& m) {
  for (const auto& v : m.variables()) {
    if (v.name.rfind("zeta[", 0) == 0) return true;
  }
  return false;
}

inline void Install(RestrictedModel& rm, const RestrictionSpec& spec) {
  PQModel& pq = rm.pq;
  const Network& net = pq.net();
  spec.validate(net);
  Model& m = pq.model;
  rm.tau = spec.tau;
  rm.base_variables = m.num_variables();
  rm.base_constraints = m.num_constraints();
  rm.saved_active.clear();
  for (const char* g : {groups::kPathDefinition, groups::kPqCut}) {
    for (const auto& name : pq.group(g)) {
      rm.saved_active[name] = m.constraint(name).active;
      m.deactivate(name);
    }
  }

  auto copy_name = [](const std::string& l, std::size_t t) { return l + "#" + std::to_string(t + 1); };
  for (const auto& l : net.pools()) {
    for (std::size_t t = 0; t < spec.tau; ++t) {
      for (const auto& j : net.pool_outputs(l)) {
        rm.zeta[{l, t, j}] = m.add_variable(Name("zeta", {copy_name(l, t), j}), 0.0, 1.0, Domain::kBinary);
        for (const auto& i : net.pool_inputs(l)) {
          const double ub = pq.model.variable(pq.v.at({i, l, j})).upper;
          rm.w[{i, l, t, j}] = m.add_variable(Name("w", {i, copy_name(l, t), j}), 0.0, ub);
        }
      }
    }
  }

  auto add = [&](const char* group, const std::string& name, LinearExpr e, Sense sense, double rhs) {
    m.add_linear(name, std::move(e), sense, rhs);
    pq.groups[group].push_back(name);
  };
  for (const auto& l : net.pools()) {
    for (const auto& i : net.pool_inputs(l)) {
      // v_ilj = sum_t w_iltj
      for (const auto& j : net.pool_outputs(l)) {
        LinearExpr e;
        e.add(pq.v.at({i, l, j}), 1.0);
        for (std::size_t t = 0; t < spec.tau; ++t) e.add(rm.w.at({i, l, t, j}), -1.0);
        add(groups::kFlowBalance, Name(groups::kFlowBalance, {i, l, j}), std::move(e), Sense::kEqual, 0.0);
      }
      // sum_j w_iltj = gamma_lt sum_j v_ilj
      for (std::size_t t = 0; t < spec.tau; ++t) {
        LinearExpr e;
        const double g = spec.weight(l, t);
        for (const auto& j : net.pool_outputs(l)) {
          e.add(rm.w.at({i, l, t, j}), 1.0);
          e.add(pq.v.at({i, l, j}), -g);
        }
        add(groups::kFlowBalance2, Name(groups::kFlowBalance2, {i, copy_name(l, t)}), std::move(e),
            Sense::kEqual, 0.0);
      }
    }
    for (std::size_t t = 0; t < spec.tau; ++t) {
      LinearExpr choice;
      for (const auto& j : net.pool_outputs(l)) {
        const VarId z = rm.zeta.at({l, t, j});
        choice.add(z, 1.0);
        const double c_lj = pq.capacities.lj.at({l, j});
        for (const auto& i : net.pool_inputs(l)) {
          const VarId wv = rm.w.at({i, l, t, j});
          const double cap = std::isfinite(c_lj) ? c_lj : pq.model.variable(wv).upper;
          if (!std::isfinite(cap)) continue;
          LinearExpr e;
          e.add(wv, 1.0);
          e.add(z, -cap);
          add(groups::kFlowChoiceLimit, Name(groups::kFlowChoiceLimit, {i, copy_name(l, t), j}),
              std::move(e), Sense::kLessEqual, 0.0);
        }
      }
      add(groups::kFlowChoice, Name(groups::kFlowChoice, {copy_name(l, t)}), std::move(choice),
          Sense::kEqual, 1.0);
    }
  }
  rm.installed = true;
}

}  // namespace detail

// Appends the restriction sub-block to a copy of `pq` and deactivates its
// bilinear rows. The objective is left unchanged.
inline RestrictedModel install_restriction(const PQModel& pq, const RestrictionSpec& spec = {}) {
  if (detail::HasRestriction(pq.model)) {
    throw Error(ErrorCode::kAlreadyRestricted, "model already carries a restriction");
  }
  RestrictedModel rm;
  rm.pq = pq;
  detail::Install(rm, spec);
  return rm;
}

inline void install_restriction(RestrictedModel& rm, const RestrictionSpec& spec) {
  if (rm.installed) throw Error(ErrorCode::kAlreadyRestricted, "restriction already installed");
  detail::Install(rm, spec);
}

// Removes the sub-block and restores the active flags; a second call is a
// no-op.
inline PQModel uninstall_restriction(RestrictedModel& rm) {
  if (!rm.installed) return rm.pq;
  PQModel& pq = rm.pq;
  pq.model.truncate(rm.base_variables, rm.base_constraints);
  for (const char* g : {groups::kFlowBalance, groups::kFlowBalance2, groups::kFlowChoiceLimit,
                        groups::kFlowChoice}) {
    pq.groups.erase(g);
  }
  for (const auto& [name, active] : rm.saved_active) pq.model.set_active(name, active);
  rm.saved_active.clear();
  rm.w.clear();
  rm.zeta.clear();
  rm.installed = false;
  return pq;
}

// Assignment of the base PQ variables recovered from a restriction point.
struct RestoredSolution {
  Point values;  // indexed like the PQ model
  double objective = kInf;
};

// Sets q_il = v_ilj / sum_i' v_i'lj using the output j with the most flow
// through l; pools without throughput get uniform q.
inline RestoredSolution derive_fractional_flows(const RestrictedModel& rm, const Point& solution,
                                                double tol = 1e-6) {
  const PQModel& pq = rm.pq;
  const FeasibilityReport report = is_feasible(pq.model, solution, tol);
  if (!report.feasible) {
    throw Error(ErrorCode::kInfeasibleInput, "restriction point violates '" + report.worst +
                                                 "' by " + std::to_string(report.worst_residual));
  }
  const std::size_t base = rm.installed ? rm.base_variables : pq.model.num_variables();
  RestoredSolution out;
  out.values.assign(solution.begin(), solution.begin() + static_cast<std::ptrdiff_t>(base));
  const Network& net = pq.net();
  for (const auto& l : net.pools()) {
    const auto inputs = net.pool_inputs(l);
    double best = 0.0;
    std::optional<std::string> best_j;
    for (const auto& j : net.pool_outputs(l)) {
      double sum = 0.0;
      for (const auto& i : inputs) sum += solution[pq.v.at({i, l, j}).value];
      if (sum > best) {
        best = sum;
        best_j = j;
      }
    }
    for (const auto& i : inputs) {
      const double q = (!best_j || best <= 1e-9)
                           ? 1.0 / static_cast<double>(inputs.size())
                           : solution[pq.v.at({i, l, *best_j}).value] / best;
      out.values[pq.q.at({i, l}).value] = q;
    }
  }
  out.objective = ObjectiveValue(pq.model, out.values);
  return out;
}

}  // namespace pooling
