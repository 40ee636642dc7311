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
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pooling/error.hpp"

namespace pooling {

enum class NodeLayer : int { kInput = 0, kPool = 1, kOutput = 2 };

inline const char* ToString(NodeLayer layer) {
  switch (layer) {
    case NodeLayer::kInput: return "input";
    case NodeLayer::kPool: return "pool";
    case NodeLayer::kOutput: return "output";
  }
  return "?";
}

// Named attribute tables, e.g. attr["quality"]["sulfur"] = 2.5.
using AttributeMap = std::map<std::string, std::map<std::string, double>>;

namespace attr_keys {
inline constexpr const char* kQuality = "quality";
inline constexpr const char* kQualityUpper = "quality_upper";
inline constexpr const char* kQualityLower = "quality_lower";
}  // namespace attr_keys

// Capacity bounds keep "absent" distinct from 0 / +inf; the PQ builder
// normalizes them.
struct Capacity {
  std::optional<double> lower;
  std::optional<double> upper;

  double lower_or_zero() const { return lower.value_or(0.0); }
  double upper_or_inf() const {
    return upper.value_or(std::numeric_limits<double>::infinity());
  }
  bool operator==(const Capacity&) const = default;
};

struct Node {
  std::string name;
  NodeLayer layer = NodeLayer::kInput;
  Capacity capacity;
  double cost = 0.0;
  AttributeMap attr;

  // Returns nullptr if the table is absent.
  const std::map<std::string, double>* table(const std::string& key) const {
    auto it = attr.find(key);
    return it == attr.end() ? nullptr : &it->second;
  }
  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string source;
  std::string destination;
  Capacity capacity;
  double cost = 0.0;
  double fixed_cost = 0.0;
  AttributeMap attr;
  // Input->Pool, Input->Output or Pool->Output. Other edges are kept but the
  // formulation ignores them.
  bool pq_relevant = false;

  bool operator==(const Edge&) const = default;
};

using EdgeKey = std::pair<std::string, std::string>;

// Layered pooling network. Iteration order is by name everywhere. Call
// freeze() once construction is done; a frozen network rejects mutation and
// can be shared read-only.
class Network {
 public:
  Network() = default;
  explicit Network(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  Network& add_node(NodeLayer layer, const std::string& name,
                    std::optional<double> capacity_lower = std::nullopt,
                    std::optional<double> capacity_upper = std::nullopt,
                    double cost = 0.0, AttributeMap attr = {}) {
    check_mutable();
    if (nodes_.count(name) != 0) {
      throw Error(ErrorCode::kDuplicateName, "node '" + name + "' already exists");
    }
    Capacity capacity{capacity_lower, capacity_upper};
    check_capacity(capacity, "node '" + name + "'");
    nodes_.emplace(name, Node{name, layer, capacity, cost, std::move(attr)});
    successors_[name];
    predecessors_[name];
    return *this;
  }

  Network& add_edge(const std::string& source, const std::string& destination,
                    std::optional<double> capacity_lower = std::nullopt,
                    std::optional<double> capacity_upper = std::nullopt,
                    double cost = 0.0, double fixed_cost = 0.0,
                    AttributeMap attr = {}) {
    check_mutable();
    const Node& src = node(source);
    const Node& dst = node(destination);
    EdgeKey key{source, destination};
    if (edges_.count(key) != 0) {
      throw Error(ErrorCode::kDuplicateEdge,
                  "edge " + source + "->" + destination + " already exists");
    }
    Capacity capacity{capacity_lower, capacity_upper};
    check_capacity(capacity, "edge " + source + "->" + destination);
    Edge edge{source,     destination,     capacity,
              cost,       fixed_cost,      std::move(attr),
              IsPqLayerPair(src.layer, dst.layer)};
    edges_.emplace(key, std::move(edge));
    successors_[source].insert(destination);
    predecessors_[destination].insert(source);
    return *this;
  }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  // Mutable copy of a frozen network.
  Network thawed() const {
    Network copy = *this;
    copy.frozen_ = false;
    return copy;
  }

  const std::map<std::string, Node>& nodes() const { return nodes_; }
  const std::map<EdgeKey, Edge>& edges() const { return edges_; }

  bool has_node(const std::string& name) const { return nodes_.count(name) != 0; }

  const Node& node(const std::string& name) const {
    auto it = nodes_.find(name);
    if (it == nodes_.end()) {
      throw Error(ErrorCode::kUnknownNode, "no node named '" + name + "'");
    }
    return it->second;
  }

  const Edge* find_edge(const std::string& source,
                        const std::string& destination) const {
    auto it = edges_.find(EdgeKey{source, destination});
    return it == edges_.end() ? nullptr : &it->second;
  }

  std::vector<std::string> successors(
      const std::string& name, std::optional<NodeLayer> layer = std::nullopt) const {
    node(name);
    return filter(successors_.at(name), layer);
  }

  std::vector<std::string> predecessors(
      const std::string& name, std::optional<NodeLayer> layer = std::nullopt) const {
    node(name);
    return filter(predecessors_.at(name), layer);
  }

  std::vector<std::string> nodes_in_layer(NodeLayer layer) const {
    std::vector<std::string> out;
    for (const auto& [name, n] : nodes_) {
      if (n.layer == layer) out.push_back(name);
    }
    return out;
  }
  std::vector<std::string> inputs() const { return nodes_in_layer(NodeLayer::kInput); }
  std::vector<std::string> pools() const { return nodes_in_layer(NodeLayer::kPool); }
  std::vector<std::string> outputs() const { return nodes_in_layer(NodeLayer::kOutput); }

  // I_l: inputs with a PQ edge into pool l.
  std::vector<std::string> pool_inputs(const std::string& pool) const {
    return predecessors(pool, NodeLayer::kInput);
  }
  // J_l: outputs fed by pool l.
  std::vector<std::string> pool_outputs(const std::string& pool) const {
    return successors(pool, NodeLayer::kOutput);
  }
  // I_j: inputs bypassing straight into output j.
  std::vector<std::string> output_inputs(const std::string& output) const {
    return predecessors(output, NodeLayer::kInput);
  }
  std::vector<std::string> output_pools(const std::string& output) const {
    return predecessors(output, NodeLayer::kPool);
  }

  // K: sorted union of the input quality keys.
  std::vector<std::string> quality_keys() const {
    std::set<std::string> keys;
    for (const auto& [name, n] : nodes_) {
      if (n.layer != NodeLayer::kInput) continue;
      if (const auto* q = n.table(attr_keys::kQuality)) {
        for (const auto& [k, value] : *q) keys.insert(k);
      }
    }
    return {keys.begin(), keys.end()};
  }

  friend bool operator==(const Network& a, const Network& b) {
    return a.name_ == b.name_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

  static bool IsPqLayerPair(NodeLayer from, NodeLayer to) {
    return (from == NodeLayer::kInput && to == NodeLayer::kPool) ||
           (from == NodeLayer::kInput && to == NodeLayer::kOutput) ||
           (from == NodeLayer::kPool && to == NodeLayer::kOutput);
  }

 private:
  void check_mutable() const {
    if (frozen_) {
      throw Error(ErrorCode::kFrozenNetwork, "network '" + name_ + "' is frozen");
    }
  }

  static void check_capacity(const Capacity& c, const std::string& what) {
    if ((c.lower && *c.lower < 0.0) || (c.upper && *c.upper < 0.0)) {
      throw Error(ErrorCode::kInvalidBounds, what + ": negative capacity");
    }
    if (c.lower_or_zero() > c.upper_or_inf()) {
      throw Error(ErrorCode::kInvalidBounds, what + ": capacity lower > upper");
    }
  }

  std::vector<std::string> filter(const std::set<std::string>& names,
                                  std::optional<NodeLayer> layer) const {
    std::vector<std::string> out;
    for (const auto& n : names) {
      if (!layer || nodes_.at(n).layer == *layer) out.push_back(n);
    }
    return out;
  }

  std::string name_;
  std::map<std::string, Node> nodes_;
  std::map<EdgeKey, Edge> edges_;
  std::map<std::string, std::set<std::string>> successors_;
  std::map<std::string, std::set<std::string>> predecessors_;
  bool frozen_ = false;
};

}  // namespace pooling
