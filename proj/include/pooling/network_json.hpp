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

#include <optional>
#include <string>

#include "json.hpp"
#include "pooling/error.hpp"
#include "pooling/network.hpp"

namespace pooling {

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json CapacityToJson(const Capacity& c) {
  ordered_json out = ordered_json::array();
  out.push_back(c.lower ? ordered_json(*c.lower) : ordered_json(nullptr));
  out.push_back(c.upper ? ordered_json(*c.upper) : ordered_json(nullptr));
  return out;
}

inline ordered_json AttrToJson(const AttributeMap& attr) {
  ordered_json out = ordered_json::object();
  for (const auto& [key, table] : attr) {
    ordered_json t = ordered_json::object();
    for (const auto& [k, v] : table) t[k] = v;
    out[key] = std::move(t);
  }
  return out;
}

[[noreturn]] inline void FieldError(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kParseError, path + ": " + what);
}

inline const nlohmann::json& Require(const nlohmann::json& obj, const char* key,
                                     const std::string& path) {
  if (!obj.is_object()) FieldError(path, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) FieldError(path + "." + key, "missing field");
  return *it;
}

inline double RequireNumber(const nlohmann::json& obj, const char* key,
                            const std::string& path, std::optional<double> fallback) {
  if (obj.is_object() && !obj.contains(key) && fallback) return *fallback;
  const auto& v = Require(obj, key, path);
  if (!v.is_number()) FieldError(path + "." + key, "expected number");
  return v.get<double>();
}

inline Capacity CapacityFromJson(const nlohmann::json& obj, const std::string& path) {
  Capacity c;
  if (!obj.contains("capacity")) return c;
  const auto& arr = obj.at("capacity");
  const std::string p = path + ".capacity";
  if (!arr.is_array() || arr.size() != 2) FieldError(p, "expected [lower, upper]");
  for (int side = 0; side < 2; ++side) {
    const auto& v = arr[side];
    if (v.is_null()) continue;
    if (!v.is_number()) FieldError(p + "[" + std::to_string(side) + "]", "expected number or null");
    (side == 0 ? c.lower : c.upper) = v.get<double>();
  }
  return c;
}

inline AttributeMap AttrFromJson(const nlohmann::json& obj, const std::string& path) {
  AttributeMap attr;
  if (!obj.contains("attr")) return attr;
  const auto& a = obj.at("attr");
  const std::string p = path + ".attr";
  if (!a.is_object()) FieldError(p, "expected object");
  for (const auto& [key, table] : a.items()) {
    if (!table.is_object()) FieldError(p + "." + key, "expected object");
    auto& out = attr[key];
    for (const auto& [k, v] : table.items()) {
      if (!v.is_number()) FieldError(p + "." + key + "." + k, "expected number");
      out[k] = v.get<double>();
    }
  }
  return attr;
}

}  // namespace detail

// Serializes nodes and edges in name order; absent capacities become null.
inline std::string to_json(const Network& net, int indent = 2) {
  using detail::ordered_json;
  ordered_json doc;
  doc["name"] = net.name();
  ordered_json nodes = ordered_json::array();
  for (const auto& [name, n] : net.nodes()) {
    ordered_json node;
    node["name"] = n.name;
    node["layer"] = static_cast<int>(n.layer);
    node["capacity"] = detail::CapacityToJson(n.capacity);
    node["cost"] = n.cost;
    node["attr"] = detail::AttrToJson(n.attr);
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const auto& [key, e] : net.edges()) {
    ordered_json edge;
    edge["source"] = e.source;
    edge["destination"] = e.destination;
    edge["capacity"] = detail::CapacityToJson(e.capacity);
    edge["cost"] = e.cost;
    edge["fixed_cost"] = e.fixed_cost;
    edge["attr"] = detail::AttrToJson(e.attr);
    edges.push_back(std::move(edge));
  }
  doc["edges"] = std::move(edges);
  return doc.dump(indent) + "\n";
}

// Parses an instance document. Errors carry the offending field path, or the
// line/column for malformed JSON. The result is not frozen.
inline Network from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed JSON: ") + e.what());
  }
  const auto& name = detail::Require(doc, "name", "$");
  if (!name.is_string()) detail::FieldError("$.name", "expected string");
  Network net(name.get<std::string>());

  const auto& nodes = detail::Require(doc, "nodes", "$");
  if (!nodes.is_array()) detail::FieldError("$.nodes", "expected array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "$.nodes[" + std::to_string(i) + "]";
    const auto& n = nodes[i];
    const auto& node_name = detail::Require(n, "name", path);
    if (!node_name.is_string()) detail::FieldError(path + ".name", "expected string");
    const auto& layer = detail::Require(n, "layer", path);
    if (!layer.is_number_integer() || layer.get<int>() < 0 || layer.get<int>() > 2) {
      detail::FieldError(path + ".layer", "expected 0 (input), 1 (pool) or 2 (output)");
    }
    Capacity cap = detail::CapacityFromJson(n, path);
    try {
      net.add_node(static_cast<NodeLayer>(layer.get<int>()), node_name.get<std::string>(),
                   cap.lower, cap.upper, detail::RequireNumber(n, "cost", path, 0.0),
                   detail::AttrFromJson(n, path));
    } catch (const Error& e) {
      detail::FieldError(path, e.what());
    }
  }

  const auto& edges = detail::Require(doc, "edges", "$");
  if (!edges.is_array()) detail::FieldError("$.edges", "expected array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "$.edges[" + std::to_string(i) + "]";
    const auto& e = edges[i];
    const auto& src = detail::Require(e, "source", path);
    const auto& dst = detail::Require(e, "destination", path);
    if (!src.is_string()) detail::FieldError(path + ".source", "expected string");
    if (!dst.is_string()) detail::FieldError(path + ".destination", "expected string");
    Capacity cap = detail::CapacityFromJson(e, path);
    try {
      net.add_edge(src.get<std::string>(), dst.get<std::string>(), cap.lower, cap.upper,
                   detail::RequireNumber(e, "cost", path, 0.0),
                   detail::RequireNumber(e, "fixed_cost", path, 0.0),
                   detail::AttrFromJson(e, path));
    } catch (const Error& err) {
      detail::FieldError(path, err.what());
    }
  }
  return net;
}

}  // namespace pooling
