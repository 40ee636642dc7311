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
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pooling/network.hpp"

namespace pooling::testing {

// Haverly's first pooling instance: two crude sources blended in one pool,
// a third source bypassing to both products.
inline Network MakeH1(bool freeze = true) {
  Network n("h1");
  auto quality = [](double c) { return AttributeMap{{attr_keys::kQuality, {{"sulfur", c}}}}; };
  auto upper = [](double p) { return AttributeMap{{attr_keys::kQualityUpper, {{"sulfur", p}}}}; };
  n.add_node(NodeLayer::kInput, "i1", std::nullopt, std::nullopt, 6.0, quality(3.0));
  n.add_node(NodeLayer::kInput, "i2", std::nullopt, std::nullopt, 16.0, quality(1.0));
  n.add_node(NodeLayer::kInput, "i3", std::nullopt, std::nullopt, 10.0, quality(2.0));
  n.add_node(NodeLayer::kPool, "l1", 0.0, 300.0);
  n.add_node(NodeLayer::kOutput, "j1", 0.0, 100.0, 9.0, upper(2.5));
  n.add_node(NodeLayer::kOutput, "j2", 0.0, 200.0, 15.0, upper(1.5));
  n.add_edge("i1", "l1");
  n.add_edge("i2", "l1");
  n.add_edge("l1", "j1");
  n.add_edge("l1", "j2");
  n.add_edge("i3", "j1");
  n.add_edge("i3", "j2");
  if (freeze) n.freeze();
  return n;
}

// Uniform doubles from raw engine bits (portable across standard libraries).
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : engine_(seed) {}
  double Uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }
  std::size_t Index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool Coin(double p) { return Uniform(0.0, 1.0) < p; }
  double Round2(double lo, double hi) { return std::round(Uniform(lo, hi) * 100.0) / 100.0; }

 private:
  std::mt19937_64 engine_;
};

// Small instances the grid oracle can enumerate: at most 4 inputs, 2 pools,
// 3 outputs and 2 qualities, at most 2 inputs per pool when there are two
// pools (3 with one pool).
inline Network MakeTiny(std::uint64_t seed) {
  TestRng rng(seed * 7919 + 17);
  const std::size_t ni = 2 + rng.Index(3);
  const std::size_t nl = 1 + rng.Index(2);
  const std::size_t nj = 1 + rng.Index(3);
  const std::size_t nk = 1 + rng.Index(2);
  Network n("tiny_" + std::to_string(seed));
  std::vector<std::string> keys;
  for (std::size_t k = 0; k < nk; ++k) keys.push_back("k" + std::to_string(k + 1));
  for (std::size_t i = 0; i < ni; ++i) {
    AttributeMap a;
    for (const auto& k : keys) a[attr_keys::kQuality][k] = rng.Round2(0.5, 4.0);
    std::optional<double> cap;
    if (rng.Coin(0.3)) cap = rng.Round2(40.0, 150.0);
    n.add_node(NodeLayer::kInput, "i" + std::to_string(i + 1), std::nullopt, cap,
               rng.Round2(1.0, 16.0), a);
  }
  for (std::size_t l = 0; l < nl; ++l) {
    n.add_node(NodeLayer::kPool, "l" + std::to_string(l + 1), 0.0, rng.Round2(50.0, 300.0));
  }
  for (std::size_t j = 0; j < nj; ++j) {
    AttributeMap a;
    for (const auto& k : keys) a[attr_keys::kQualityUpper][k] = rng.Round2(1.0, 3.5);
    n.add_node(NodeLayer::kOutput, "j" + std::to_string(j + 1), 0.0, rng.Round2(50.0, 200.0),
               rng.Round2(8.0, 20.0), a);
  }
  const std::size_t per_pool = nl == 2 ? 2 : 3;
  for (std::size_t l = 0; l < nl; ++l) {
    const std::string pool = "l" + std::to_string(l + 1);
    std::set<std::size_t> ins;
    const std::size_t want = 1 + rng.Index(std::min(per_pool, ni));
    while (ins.size() < std::max<std::size_t>(want, 2) && ins.size() < ni) ins.insert(rng.Index(ni));
    for (std::size_t i : ins) n.add_edge("i" + std::to_string(i + 1), pool);
    bool any = false;
    for (std::size_t j = 0; j < nj; ++j) {
      if (rng.Coin(0.7) || (!any && j + 1 == nj)) {
        n.add_edge(pool, "j" + std::to_string(j + 1));
        any = true;
      }
    }
  }
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < nj; ++j) {
      if (rng.Coin(0.3)) n.add_edge("i" + std::to_string(i + 1), "j" + std::to_string(j + 1));
    }
  }
  n.freeze();
  return n;
}

}  // namespace pooling::testing
