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
#include <initializer_list>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pooling/error.hpp"
#include "pooling/model.hpp"
#include "pooling/network.hpp"

namespace pooling {

using Pair = std::pair<std::string, std::string>;
using Triple = std::tuple<std::string, std::string, std::string>;

// Index sets of a pooling network, all sorted and duplicate-free.
struct IndexSets {
  std::vector<Triple> ilj;  // (i,l) and (l,j) both edges
  std::vector<Pair> il;
  std::vector<Pair> lj;
  std::vector<Pair> ij;
  std::vector<Pair> jk;     // (output, quality with an upper bound)
  bool operator==(const IndexSets&) const = default;
};

inline std::vector<Pair> index_set_il(const Network& net) {
  std::vector<Pair> out;
  for (const auto& l : net.pools()) {
    for (const auto& i : net.pool_inputs(l)) out.emplace_back(i, l);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Pair> index_set_lj(const Network& net) {
  std::vector<Pair> out;
  for (const auto& l : net.pools()) {
    for (const auto& j : net.pool_outputs(l)) out.emplace_back(l, j);
  }
  return out;
}

inline std::vector<Pair> index_set_ij(const Network& net) {
  std::vector<Pair> out;
  for (const auto& j : net.outputs()) {
    for (const auto& i : net.output_inputs(j)) out.emplace_back(i, j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Triple> index_set_ilj(const Network& net) {
  std::vector<Triple> out;
  for (const auto& l : net.pools()) {
    const auto inputs = net.pool_inputs(l);
    const auto outputs = net.pool_outputs(l);
    for (const auto& i : inputs) {
      for (const auto& j : outputs) out.emplace_back(i, l, j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Pair> index_set_jk(const Network& net) {
  std::vector<Pair> out;
  for (const auto& j : net.outputs()) {
    if (const auto* upper = net.node(j).table(attr_keys::kQualityUpper)) {
      for (const auto& [k, value] : *upper) out.emplace_back(j, k);
    }
  }
  return out;
}

inline IndexSets index_sets(const Network& net) {
  return IndexSets{index_set_ilj(net), index_set_il(net), index_set_lj(net),
                   index_set_ij(net), index_set_jk(net)};
}

namespace groups {
inline constexpr const char* kPathDefinition = "path_definition";
inline constexpr const char* kSimplex = "simplex";
inline constexpr const char* kQualityUpper = "product_quality_upper";
inline constexpr const char* kQualityLower = "product_quality_lower";
inline constexpr const char* kInputCapacity = "input_capacity";
inline constexpr const char* kInputCapacityLower = "input_capacity_lower";
inline constexpr const char* kPoolCapacity = "pool_capacity";
inline constexpr const char* kPoolCapacityLower = "pool_capacity_lower";
inline constexpr const char* kOutputCapacity = "output_capacity";
inline constexpr const char* kOutputCapacityLower = "output_capacity_lower";
inline constexpr const char* kReduction1 = "reduction_1";
inline constexpr const char* kReduction2 = "reduction_2";
inline constexpr const char* kInputPoolCapacity = "input_pool_capacity";
inline constexpr const char* kPqCut = "pq_cut";
}  // namespace groups

// Effective flow capacities, +inf where nothing bounds the flow.
struct FlowCapacities {
  std::map<Pair, double> il;              // c_il
  std::map<Pair, double> lj;              // c_lj
  std::map<Pair, double> ij;              // c_ij
  std::map<std::string, double> pool;     // c_l
  std::map<std::string, double> output;   // total inflow bound of output j
  bool operator==(const FlowCapacities&) const = default;
};

inline double EdgeUpper(const Network& net, const std::string& a, const std::string& b) {
  const Edge* e = net.find_edge(a, b);
  return e ? e->capacity.upper_or_inf() : kInf;
}

inline FlowCapacities flow_capacities(const Network& net) {
  FlowCapacities caps;
  auto upper = [&](const std::string& n) { return net.node(n).capacity.upper_or_inf(); };
  for (const auto& [i, l] : index_set_il(net)) {
    caps.il[{i, l}] = std::min({EdgeUpper(net, i, l), upper(i), upper(l)});
  }
  for (const auto& [l, j] : index_set_lj(net)) {
    caps.lj[{l, j}] = std::min({EdgeUpper(net, l, j), upper(l), upper(j)});
  }
  for (const auto& [i, j] : index_set_ij(net)) {
    caps.ij[{i, j}] = std::min({EdgeUpper(net, i, j), upper(i), upper(j)});
  }
  for (const auto& l : net.pools()) caps.pool[l] = upper(l);
  for (const auto& j : net.outputs()) {
    double in_sum = 0.0;
    for (const auto& l : net.output_pools(j)) in_sum += caps.lj[{l, j}];
    for (const auto& i : net.output_inputs(j)) in_sum += caps.ij[{i, j}];
    caps.output[j] = std::min(upper(j), in_sum);
  }
  return caps;
}

// PQ-formulation of a pooling network, with named handles to its variables
// and constraint groups.
struct PQModel {
  Model model;
  std::shared_ptr<const Network> network;
  IndexSets index;
  FlowCapacities capacities;
  std::map<Pair, VarId> q;         // (i,l)
  std::map<Triple, VarId> v;       // (i,l,j)
  std::map<Pair, VarId> y_pool;    // (l,j)
  std::map<Pair, VarId> y_bypass;  // (i,j)
  std::map<std::string, std::vector<std::string>> groups;

  const Network& net() const { return *network; }

  // C_ik of input i.
  double input_quality(const std::string& i, const std::string& k) const {
    const auto* table = net().node(i).table(attr_keys::kQuality);
    if (table != nullptr) {
      if (auto it = table->find(k); it != table->end()) return it->second;
    }
    throw Error(ErrorCode::kMissingQuality, "input '" + i + "' has no quality '" + k + "'");
  }
  // P^U_jk of output j.
  double quality_upper(const std::string& j, const std::string& k) const {
    return net().node(j).attr.at(attr_keys::kQualityUpper).at(k);
  }

  const std::vector<std::string>& group(const std::string& name) const {
    static const std::vector<std::string> kEmpty;
    auto it = groups.find(name);
    return it == groups.end() ? kEmpty : it->second;
  }
  void set_group_active(const std::string& name, bool active) {
    for (const auto& c : group(name)) model.set_active(c, active);
  }

  bool operator==(const PQModel& o) const {
    return model == o.model && *network == *o.network && index == o.index &&
           capacities == o.capacities && q == o.q && v == o.v && y_pool == o.y_pool &&
           y_bypass == o.y_bypass && groups == o.groups;
  }
};

namespace detail {

inline std::string Name(const std::string& base, std::initializer_list<std::string> idx) {
  std::string out = base + "[";
  bool first = true;
  for (const auto& s : idx) {
    if (!first) out += ",";
    out += s;
    first = false;
  }
  return out + "]";
}

inline void CheckQualities(const Network& net) {
  std::set<std::string> input_keys;
  for (const auto& k : net.quality_keys()) input_keys.insert(k);
  for (const auto& j : net.outputs()) {
    const Node& out = net.node(j);
    std::set<std::string> inputs_reaching;
    for (const auto& i : net.output_inputs(j)) inputs_reaching.insert(i);
    for (const auto& l : net.output_pools(j)) {
      for (const auto& i : net.pool_inputs(l)) inputs_reaching.insert(i);
    }
    for (const char* table_key : {attr_keys::kQualityUpper, attr_keys::kQualityLower}) {
      const auto* table = out.table(table_key);
      if (!table) continue;
      for (const auto& [k, bound] : *table) {
        if (input_keys.count(k) == 0) {
          throw Error(ErrorCode::kMissingQuality,
                      "output '" + j + "' bounds quality '" + k + "' that no input carries");
        }
        for (const auto& i : inputs_reaching) {
          const auto* q = net.node(i).table(attr_keys::kQuality);
          if (!q || q->count(k) == 0) {
            throw Error(ErrorCode::kMissingQuality,
                        "input '" + i + "' reaches '" + j + "' but has no quality '" + k + "'");
          }
        }
      }
    }
  }
}

}  // namespace detail

inline PQModel build_pq(std::shared_ptr<const Network> network) {
  const Network& net = *network;
  if (!net.frozen()) {
    throw Error(ErrorCode::kNetworkNotFrozen, "freeze() the network before building");
  }
  for (NodeLayer layer : {NodeLayer::kInput, NodeLayer::kPool, NodeLayer::kOutput}) {
    if (net.nodes_in_layer(layer).empty()) {
      throw Error(ErrorCode::kEmptyLayer, std::string("network has no ") + ToString(layer) + " nodes");
    }
  }
  for (const auto& l : net.pools()) {
    if (net.pool_inputs(l).empty()) {
      throw Error(ErrorCode::kInfeasiblePool, "pool '" + l + "' has no inbound edge; simplex reads 0 = 1");
    }
  }
  detail::CheckQualities(net);

  PQModel pq;
  pq.network = network;
  pq.index = index_sets(net);
  pq.capacities = flow_capacities(net);
  const auto& caps = pq.capacities;
  Model& m = pq.model;
  using detail::Name;

  for (const auto& [i, l] : pq.index.il) {
    pq.q[{i, l}] = m.add_variable(Name("q", {i, l}), 0.0, 1.0);
  }
  for (const auto& [i, l, j] : pq.index.ilj) {
    const double ub = std::min(caps.il.at({i, l}), caps.lj.at({l, j}));
    pq.v[{i, l, j}] = m.add_variable(Name("v", {i, l, j}), 0.0, ub);
  }
  for (const auto& [l, j] : pq.index.lj) {
    const Edge* e = net.find_edge(l, j);
    pq.y_pool[{l, j}] = m.add_variable(Name("y", {l, j}), e->capacity.lower_or_zero(),
                                       caps.lj.at({l, j}));
  }
  for (const auto& [i, j] : pq.index.ij) {
    const Edge* e = net.find_edge(i, j);
    pq.y_bypass[{i, j}] = m.add_variable(Name("y", {i, j}), e->capacity.lower_or_zero(),
                                         caps.ij.at({i, j}));
  }

  auto add = [&](const char* group, Constraint c) {
    pq.groups[group].push_back(c.name);
    m.add_constraint(std::move(c));
  };

  // Objective: sum c_i v_ilj - sum d_j y_lj - sum (d_j - c_i) y_ij.
  for (const auto& [key, var] : pq.v) {
    m.objective().add(var, net.node(std::get<0>(key)).cost);
  }
  for (const auto& [key, var] : pq.y_pool) {
    m.objective().add(var, -net.node(key.second).cost);
  }
  for (const auto& [key, var] : pq.y_bypass) {
    m.objective().add(var, -(net.node(key.second).cost - net.node(key.first).cost));
  }

  for (const auto& [key, var] : pq.v) {
    const auto& [i, l, j] = key;
    Constraint c{Name(groups::kPathDefinition, {i, l, j}), {}, {}, Sense::kEqual, 0.0, true};
    c.linear.add(var, 1.0);
    c.bilinear.push_back(BilinearTerm::Make(-1.0, pq.q.at({i, l}), pq.y_pool.at({l, j})));
    add(groups::kPathDefinition, std::move(c));
  }

  for (const auto& l : net.pools()) {
    LinearExpr e;
    for (const auto& i : net.pool_inputs(l)) e.add(pq.q.at({i, l}), 1.0);
    add(groups::kSimplex, Constraint{Name(groups::kSimplex, {l}), e, {}, Sense::kEqual, 1.0, true});
  }

  // Quality rows: sum C_ik (inflow) - P_jk * (total inflow), compared with 0.
  for (const auto& j : net.outputs()) {
    const Node& out = net.node(j);
    for (const auto& [table_key, group, sense] :
         {std::tuple{attr_keys::kQualityUpper, groups::kQualityUpper, Sense::kLessEqual},
          std::tuple{attr_keys::kQualityLower, groups::kQualityLower, Sense::kGreaterEqual}}) {
      const auto* table = out.table(table_key);
      if (!table) continue;
      for (const auto& [k, bound] : *table) {
        LinearExpr e;
        for (const auto& l : net.output_pools(j)) {
          for (const auto& i : net.pool_inputs(l)) {
            e.add(pq.v.at({i, l, j}), pq.input_quality(i, k));
          }
          e.add(pq.y_pool.at({l, j}), -bound);
        }
        for (const auto& i : net.output_inputs(j)) {
          e.add(pq.y_bypass.at({i, j}), pq.input_quality(i, k) - bound);
        }
        if (e.empty()) continue;
        add(group, Constraint{Name(group, {j, k}), e, {}, sense, 0.0, true});
      }
    }
  }

  for (const auto& i : net.inputs()) {
    LinearExpr e;
    for (const auto& l : net.successors(i, NodeLayer::kPool)) {
      for (const auto& j : net.pool_outputs(l)) e.add(pq.v.at({i, l, j}), 1.0);
    }
    for (const auto& j : net.successors(i, NodeLayer::kOutput)) e.add(pq.y_bypass.at({i, j}), 1.0);
    if (e.empty()) continue;
    const Capacity& cap = net.node(i).capacity;
    if (cap.upper) {
      add(groups::kInputCapacity, Constraint{Name(groups::kInputCapacity, {i}), e, {}, Sense::kLessEqual, *cap.upper, true});
    }
    if (cap.lower_or_zero() > 0.0) {
      add(groups::kInputCapacityLower, Constraint{Name(groups::kInputCapacityLower, {i}), e, {}, Sense::kGreaterEqual, *cap.lower, true});
    }
  }

  for (const auto& l : net.pools()) {
    LinearExpr e;
    for (const auto& j : net.pool_outputs(l)) e.add(pq.y_pool.at({l, j}), 1.0);
    if (e.empty()) continue;
    const Capacity& cap = net.node(l).capacity;
    if (cap.upper) {
      add(groups::kPoolCapacity, Constraint{Name(groups::kPoolCapacity, {l}), e, {}, Sense::kLessEqual, *cap.upper, true});
    }
    if (cap.lower_or_zero() > 0.0) {
      add(groups::kPoolCapacityLower, Constraint{Name(groups::kPoolCapacityLower, {l}), e, {}, Sense::kGreaterEqual, *cap.lower, true});
    }
  }

  for (const auto& j : net.outputs()) {
    LinearExpr e;
    for (const auto& l : net.output_pools(j)) e.add(pq.y_pool.at({l, j}), 1.0);
    for (const auto& i : net.output_inputs(j)) e.add(pq.y_bypass.at({i, j}), 1.0);
    if (e.empty()) continue;
    const Capacity& cap = net.node(j).capacity;
    if (cap.upper) {
      add(groups::kOutputCapacity, Constraint{Name(groups::kOutputCapacity, {j}), e, {}, Sense::kLessEqual, *cap.upper, true});
    }
    if (cap.lower_or_zero() > 0.0) {
      add(groups::kOutputCapacityLower, Constraint{Name(groups::kOutputCapacityLower, {j}), e, {}, Sense::kGreaterEqual, *cap.lower, true});
    }
  }

  for (const auto& [l, j] : pq.index.lj) {
    LinearExpr e;
    for (const auto& i : net.pool_inputs(l)) e.add(pq.v.at({i, l, j}), 1.0);
    e.add(pq.y_pool.at({l, j}), -1.0);
    add(groups::kReduction1, Constraint{Name(groups::kReduction1, {l, j}), e, {}, Sense::kEqual, 0.0, true});
  }

  for (const auto& [i, l] : pq.index.il) {
    LinearExpr e;
    for (const auto& j : net.pool_outputs(l)) e.add(pq.v.at({i, l, j}), 1.0);
    const double c_l = caps.pool.at(l);
    if (std::isfinite(c_l)) {
      LinearExpr r = e;
      r.add(pq.q.at({i, l}), -c_l);
      add(groups::kReduction2, Constraint{Name(groups::kReduction2, {i, l}), r, {}, Sense::kLessEqual, 0.0, true});
    }
    const double c_il = caps.il.at({i, l});
    if (!e.empty() && std::isfinite(c_il)) {
      add(groups::kInputPoolCapacity, Constraint{Name(groups::kInputPoolCapacity, {i, l}), e, {}, Sense::kLessEqual, c_il, true});
    }
  }

  // Redundant rows y_lj = sum_i q_il * y_lj, inactive by default.
  for (const auto& [l, j] : pq.index.lj) {
    const VarId y = pq.y_pool.at({l, j});
    Constraint c{Name(groups::kPqCut, {l, j}), {}, {}, Sense::kEqual, 0.0, false};
    c.linear.add(y, -1.0);
    for (const auto& i : net.pool_inputs(l)) {
      c.bilinear.push_back(BilinearTerm::Make(1.0, pq.q.at({i, l}), y));
    }
    add(groups::kPqCut, std::move(c));
  }
  return pq;
}

inline PQModel build_pq(const Network& net) {
  return build_pq(std::make_shared<const Network>(net));
}

// Regenerates the model from `network`; constraints present under the same
// name keep their active flag.
inline PQModel rebuild(const PQModel& pq, std::shared_ptr<const Network> network) {
  PQModel fresh = build_pq(std::move(network));
  for (const auto& c : pq.model.constraints()) {
    if (fresh.model.has_constraint(c.name)) fresh.model.set_active(c.name, c.active);
  }
  return fresh;
}

inline PQModel rebuild(const PQModel& pq) { return rebuild(pq, pq.network); }

}  // namespace pooling
