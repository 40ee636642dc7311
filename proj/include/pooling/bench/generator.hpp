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
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pooling/error.hpp"
#include "pooling/network.hpp"

namespace pooling::bench {

enum class Family { kSparseHaverly, kDenseRand };

inline const char* ToString(Family f) {
  return f == Family::kSparseHaverly ? "sparse_haverly" : "dense_rand";
}

inline Family ParseFamily(const std::string& s) {
  if (s == "sparse_haverly" || s == "sparse") return Family::kSparseHaverly;
  if (s == "dense_rand" || s == "dense") return Family::kDenseRand;
  throw Error(ErrorCode::kInvalidArgument, "unknown family '" + s + "'");
}

struct GenSpec {
  Family family = Family::kSparseHaverly;
  std::size_t ni = 3, nl = 1, nj = 2, nk = 1;
  std::size_t na = 6;
  std::uint64_t seed = 0;

  std::string instance_name() const {
    return std::string(ToString(family)) + "_" + std::to_string(ni) + "_" + std::to_string(nl) +
           "_" + std::to_string(nj) + "_" + std::to_string(nk) + "_" + std::to_string(na) + "_s" +
           std::to_string(seed);
  }
};

namespace detail {

// Uniform draws built from raw engine bits so sequences do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  // Rounded to two decimals so emitted JSON stays short.
  double Value(double lo, double hi) { return std::round(Uniform(lo, hi) * 100.0) / 100.0; }
  std::size_t Index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool Coin(double p) { return Uniform(0.0, 1.0) < p; }

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[Index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

using EdgeList = std::vector<std::pair<std::string, std::string>>;

inline std::string Input(std::size_t i) { return "i" + std::to_string(i + 1); }
inline std::string Pool(std::size_t l) { return "l" + std::to_string(l + 1); }
inline std::string Output(std::size_t j) { return "j" + std::to_string(j + 1); }

// Haverly-style blocks: block b owns the inputs and outputs congruent to b
// modulo |L|; all but the last input of a block feed its pool, the last one
// bypasses to the block's outputs. Edges giving every pool one inbound and
// one outbound edge come first.
inline EdgeList SparseTemplate(const GenSpec& spec) {
  EdgeList first, rest;
  for (std::size_t b = 0; b < spec.nl; ++b) {
    std::vector<std::size_t> ins, outs;
    for (std::size_t i = b; i < spec.ni; i += spec.nl) ins.push_back(i);
    for (std::size_t j = b; j < spec.nj; j += spec.nl) outs.push_back(j);
    if (ins.empty()) ins.push_back(b % spec.ni);
    if (outs.empty()) outs.push_back(b % spec.nj);
    const std::size_t pooled = ins.size() >= 2 ? ins.size() - 1 : ins.size();
    for (std::size_t n = 0; n < pooled; ++n) {
      (n == 0 ? first : rest).emplace_back(Input(ins[n]), Pool(b));
    }
    for (std::size_t n = 0; n < outs.size(); ++n) {
      (n == 0 ? first : rest).emplace_back(Pool(b), Output(outs[n]));
    }
    if (pooled < ins.size()) {
      for (std::size_t j : outs) rest.emplace_back(Input(ins.back()), Output(j));
    }
  }
  first.insert(first.end(), rest.begin(), rest.end());
  return first;
}

// Complete input-pool and pool-output layers in random order, with one
// inbound and one outbound edge per pool first.
inline EdgeList DenseTemplate(const GenSpec& spec, Rng& rng) {
  EdgeList first, rest;
  for (std::size_t l = 0; l < spec.nl; ++l) {
    const std::size_t in = rng.Index(spec.ni);
    const std::size_t out = rng.Index(spec.nj);
    first.emplace_back(Input(in), Pool(l));
    first.emplace_back(Pool(l), Output(out));
    for (std::size_t i = 0; i < spec.ni; ++i) {
      if (i != in) rest.emplace_back(Input(i), Pool(l));
    }
    for (std::size_t j = 0; j < spec.nj; ++j) {
      if (j != out) rest.emplace_back(Pool(l), Output(j));
    }
  }
  rng.Shuffle(rest);
  first.insert(first.end(), rest.begin(), rest.end());
  return first;
}

}  // namespace detail

// Seeded pooling network with the requested layer sizes and edge count.
inline Network generate_instance(const GenSpec& spec) {
  if (spec.ni == 0 || spec.nl == 0 || spec.nj == 0 || spec.nk == 0) {
    throw Error(ErrorCode::kInfeasibleSpec, "layer and quality counts must be positive");
  }
  const std::size_t max_edges = spec.ni * spec.nl + spec.ni * spec.nj + spec.nl * spec.nj;
  if (spec.na > max_edges) {
    throw Error(ErrorCode::kInfeasibleSpec, std::to_string(spec.na) + " edges requested, at most " +
                                                std::to_string(max_edges) + " exist");
  }
  if (spec.na < 2 * spec.nl) {
    throw Error(ErrorCode::kInfeasibleSpec,
                "every pool needs an inbound and an outbound edge: need at least " +
                    std::to_string(2 * spec.nl) + " edges");
  }
  detail::Rng rng(spec.seed);
  Network net(spec.instance_name());

  std::vector<std::string> keys;
  for (std::size_t k = 0; k < spec.nk; ++k) keys.push_back("k" + std::to_string(k + 1));

  for (std::size_t i = 0; i < spec.ni; ++i) {
    AttributeMap attr;
    double mean_quality = 0.0;
    for (const auto& k : keys) {
      const double c = rng.Value(0.5, 4.0);
      attr[attr_keys::kQuality][k] = c;
      mean_quality += c / static_cast<double>(keys.size());
    }
    // Cleaner inputs cost more, as in the Haverly data.
    const double cost = std::clamp(std::round((17.0 - 3.0 * mean_quality + rng.Uniform(-1.0, 1.0)) * 100.0) / 100.0,
                                   1.0, 16.0);
    std::optional<double> cap;
    if (rng.Coin(0.5)) cap = rng.Value(100.0, 400.0);
    net.add_node(NodeLayer::kInput, detail::Input(i), std::nullopt, cap, cost, std::move(attr));
  }
  for (std::size_t l = 0; l < spec.nl; ++l) {
    net.add_node(NodeLayer::kPool, detail::Pool(l), 0.0, rng.Value(100.0, 400.0), 0.0, {});
  }
  for (std::size_t j = 0; j < spec.nj; ++j) {
    AttributeMap attr;
    for (const auto& k : keys) attr[attr_keys::kQualityUpper][k] = rng.Value(1.0, 3.5);
    const double price = rng.Value(8.0, 20.0);
    net.add_node(NodeLayer::kOutput, detail::Output(j), 0.0, rng.Value(50.0, 300.0), price,
                 std::move(attr));
  }

  detail::EdgeList edges = spec.family == Family::kSparseHaverly ? detail::SparseTemplate(spec)
                                                                 : detail::DenseTemplate(spec, rng);
  std::set<std::pair<std::string, std::string>> used;
  auto add = [&](const std::pair<std::string, std::string>& e) {
    if (used.size() >= spec.na || !used.insert(e).second) return;
    net.add_edge(e.first, e.second);
  };
  for (const auto& e : edges) add(e);

  if (used.size() < spec.na) {
    // Remaining candidates: bypass edges first for the dense family, all
    // layer pairs for the sparse one.
    detail::EdgeList extra;
    for (std::size_t i = 0; i < spec.ni; ++i) {
      for (std::size_t j = 0; j < spec.nj; ++j) extra.emplace_back(detail::Input(i), detail::Output(j));
    }
    if (spec.family == Family::kSparseHaverly) {
      for (std::size_t l = 0; l < spec.nl; ++l) {
        for (std::size_t i = 0; i < spec.ni; ++i) extra.emplace_back(detail::Input(i), detail::Pool(l));
        for (std::size_t j = 0; j < spec.nj; ++j) extra.emplace_back(detail::Pool(l), detail::Output(j));
      }
    }
    rng.Shuffle(extra);
    for (const auto& e : extra) add(e);
  }
  net.freeze();
  return net;
}

}  // namespace pooling::bench
