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

#include <functional>
#include <memory>

#include <gtest/gtest.h>

#include "pooling/bench/generator.hpp"
#include "pooling/pq_formulation.hpp"
#include "support/fixtures.hpp"

namespace pooling {
namespace {

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no pooling::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(PqFormulationTest, H1Counts) {
  const PQModel pq = build_pq(testing::MakeH1());
  EXPECT_EQ(pq.q.size(), 2u);
  EXPECT_EQ(pq.v.size(), 4u);
  EXPECT_EQ(pq.y_pool.size(), 2u);
  EXPECT_EQ(pq.y_bypass.size(), 2u);
  EXPECT_EQ(pq.group(groups::kSimplex).size(), 1u);
  EXPECT_EQ(pq.group(groups::kQualityUpper).size(), 2u);
  EXPECT_EQ(pq.group(groups::kPathDefinition).size(), 4u);
  EXPECT_EQ(pq.group(groups::kReduction1).size(), 2u);
  EXPECT_EQ(pq.group(groups::kReduction2).size(), 2u);
  EXPECT_EQ(pq.group(groups::kPoolCapacity).size(), 1u);
  EXPECT_EQ(pq.group(groups::kOutputCapacity).size(), 2u);
  EXPECT_TRUE(pq.group(groups::kInputCapacity).empty());
  for (const auto& name : pq.group(groups::kPqCut)) EXPECT_FALSE(pq.model.constraint(name).active);
}

TEST(PqFormulationTest, H1IndexSetIlj) {
  const Network net = testing::MakeH1();
  const std::vector<Triple> want{{"i1", "l1", "j1"}, {"i1", "l1", "j2"}, {"i2", "l1", "j1"}, {"i2", "l1", "j2"}};
  EXPECT_EQ(index_set_ilj(net), want);
  EXPECT_EQ(index_set_ij(net), (std::vector<Pair>{{"i3", "j1"}, {"i3", "j2"}}));
}

TEST(PqFormulationTest, NoPoolsGivesEmptyIlj) {
  Network n("bypass_only");
  n.add_node(NodeLayer::kInput, "a");
  n.add_node(NodeLayer::kOutput, "b");
  n.add_edge("a", "b");
  EXPECT_TRUE(index_set_ilj(n).empty());
}

TEST(PqFormulationTest, IljCountIsSumOfProducts) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Network net = bench::generate_instance({bench::Family::kDenseRand, 6, 3, 4, 2, 25, seed});
    std::size_t want = 0;
    for (const auto& l : net.pools()) want += net.pool_inputs(l).size() * net.pool_outputs(l).size();
    EXPECT_EQ(index_set_ilj(net).size(), want);
  }
}

TEST(PqFormulationTest, Adhya4FragmentBounds) {
  Network n("fragment");
  n.add_node(NodeLayer::kInput, "c1", 0.0, 85.0, 15.0, {{attr_keys::kQuality, {{"q1", 0.5}}}});
  n.add_node(NodeLayer::kPool, "o1", 0.0, 85.0, 0.0);
  n.add_node(NodeLayer::kOutput, "p1", 0.0, 20.0, 16.0, {{attr_keys::kQualityUpper, {{"q1", 1.0}}}});
  n.add_edge("c1", "o1", std::nullopt, 85.0);
  n.freeze();
  const PQModel pq = build_pq(n);
  const Variable& q = pq.model.variable(pq.q.at({"c1", "o1"}));
  EXPECT_EQ(q.lower, 0.0);
  EXPECT_EQ(q.upper, 1.0);
  const Constraint& r2 = pq.model.constraint("reduction_2[c1,o1]");
  EXPECT_EQ(r2.linear.coefficient(pq.q.at({"c1", "o1"})), -85.0);
}

TEST(PqFormulationTest, BuildErrors) {
  Network unfrozen = testing::MakeH1(false);
  EXPECT_EQ(CodeOf([&] { build_pq(std::make_shared<const Network>(unfrozen)); }),
            ErrorCode::kNetworkNotFrozen);

  Network no_pool("no_pool");
  no_pool.add_node(NodeLayer::kInput, "a", std::nullopt, std::nullopt, 1.0, {{attr_keys::kQuality, {{"k", 1.0}}}});
  no_pool.add_node(NodeLayer::kOutput, "b");
  no_pool.add_edge("a", "b");
  no_pool.freeze();
  EXPECT_EQ(CodeOf([&] { build_pq(no_pool); }), ErrorCode::kEmptyLayer);

  Network dangling = testing::MakeH1(false);
  dangling.add_node(NodeLayer::kPool, "l2");
  dangling.add_edge("l2", "j1");
  dangling.freeze();
  EXPECT_EQ(CodeOf([&] { build_pq(dangling); }), ErrorCode::kInfeasiblePool);

  Network missing = testing::MakeH1(false);
  missing.add_node(NodeLayer::kOutput, "j3", 0.0, 10.0, 1.0, {{attr_keys::kQualityUpper, {{"lead", 1.0}}}});
  missing.add_edge("l1", "j3");
  missing.freeze();
  EXPECT_EQ(CodeOf([&] { build_pq(missing); }), ErrorCode::kMissingQuality);
}

TEST(PqFormulationTest, EffectiveCapacities) {
  const PQModel pq = build_pq(testing::MakeH1());
  EXPECT_EQ(pq.capacities.lj.at({"l1", "j1"}), 100.0);
  EXPECT_EQ(pq.capacities.lj.at({"l1", "j2"}), 200.0);
  EXPECT_EQ(pq.capacities.ij.at({"i3", "j2"}), 200.0);
  EXPECT_EQ(pq.capacities.il.at({"i1", "l1"}), 300.0);
  EXPECT_EQ(pq.capacities.pool.at("l1"), 300.0);
  EXPECT_EQ(pq.capacities.output.at("j1"), 100.0);
  EXPECT_EQ(pq.model.variable(pq.v.at({"i1", "l1", "j1"})).upper, 100.0);
}

TEST(PqFormulationTest, ZeroFlowObjectiveIsZero) {
  const PQModel pq = build_pq(testing::MakeTiny(4));
  Point p(pq.model.num_variables(), 0.0);
  EXPECT_EQ(ObjectiveValue(pq.model, p), 0.0);
}

TEST(PqFormulationTest, ObjectiveMatchesFlowCosts) {
  const PQModel pq = build_pq(testing::MakeH1());
  Point p(pq.model.num_variables(), 0.0);
  // 100 units of i2 through the pool to j2, 100 units of i3 to j2.
  p[pq.q.at({"i2", "l1"}).value] = 1.0;
  p[pq.v.at({"i2", "l1", "j2"}).value] = 100.0;
  p[pq.y_pool.at({"l1", "j2"}).value] = 100.0;
  p[pq.y_bypass.at({"i3", "j2"}).value] = 100.0;
  EXPECT_DOUBLE_EQ(ObjectiveValue(pq.model, p), 16.0 * 100 - 15.0 * 100 - (15.0 - 10.0) * 100);
  EXPECT_DOUBLE_EQ(ObjectiveValue(pq.model, p), -400.0);
  EXPECT_TRUE(is_feasible(pq.model, p).feasible);
}

TEST(PqFormulationTest, PqCutHoldsOnPathAndSimplexPoints) {
  const PQModel pq = build_pq(testing::MakeTiny(2));
  testing::TestRng rng(11);
  const Network& net = pq.net();
  for (int trial = 0; trial < 200; ++trial) {
    Point p(pq.model.num_variables(), 0.0);
    for (const auto& l : net.pools()) {
      double sum = 0.0;
      std::vector<double> w;
      for (std::size_t n = 0; n < net.pool_inputs(l).size(); ++n) {
        w.push_back(rng.Uniform(0.0, 1.0));
        sum += w.back();
      }
      std::size_t n = 0;
      for (const auto& i : net.pool_inputs(l)) p[pq.q.at({i, l}).value] = w[n++] / sum;
    }
    for (const auto& [key, y] : pq.y_pool) p[y.value] = rng.Uniform(0.0, 50.0);
    for (const auto& [key, v] : pq.v) {
      const auto& [i, l, j] = key;
      p[v.value] = p[pq.q.at({i, l}).value] * p[pq.y_pool.at({l, j}).value];
    }
    for (const auto& name : pq.group(groups::kPqCut)) {
      EXPECT_LE(residual(pq.model, p, name), 1e-9);
    }
  }
}

TEST(PqFormulationTest, RebuildIsIdempotentAndCarriesFlags) {
  PQModel pq = build_pq(testing::MakeH1());
  EXPECT_EQ(rebuild(pq), pq);
  pq.set_group_active(groups::kPathDefinition, false);
  const PQModel again = rebuild(pq);
  for (const auto& name : again.group(groups::kPathDefinition)) {
    EXPECT_FALSE(again.model.constraint(name).active);
  }
  EXPECT_EQ(again, pq);
}

TEST(PqFormulationTest, RebuildWithNewOutputAddsCapacityRow) {
  const PQModel pq = build_pq(testing::MakeH1());
  Network grown = pq.net().thawed();
  grown.add_node(NodeLayer::kOutput, "j3", 0.0, 50.0, 12.0, {{attr_keys::kQualityUpper, {{"sulfur", 2.0}}}});
  grown.add_edge("l1", "j3");
  grown.freeze();
  const PQModel next = rebuild(pq, std::make_shared<const Network>(grown));
  EXPECT_TRUE(next.model.has_constraint("output_capacity[j3]"));
  EXPECT_FALSE(pq.model.has_constraint("output_capacity[j3]"));
}

TEST(PqFormulationTest, CountsArePureFunctionsOfTopology) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Network net = bench::generate_instance({bench::Family::kSparseHaverly, 9, 3, 6, 2, 21, seed});
    const PQModel pq = build_pq(net);
    std::size_t il = 0, ilj = 0, lj = 0, ij = 0;
    for (const auto& l : net.pools()) {
      il += net.pool_inputs(l).size();
      lj += net.pool_outputs(l).size();
      ilj += net.pool_inputs(l).size() * net.pool_outputs(l).size();
    }
    for (const auto& j : net.outputs()) ij += net.output_inputs(j).size();
    EXPECT_EQ(pq.model.num_variables(), il + ilj + lj + ij);
    EXPECT_EQ(pq.group(groups::kPathDefinition).size(), ilj);
    EXPECT_EQ(pq.group(groups::kReduction1).size(), lj);
    EXPECT_EQ(pq.group(groups::kQualityUpper).size(), 2 * net.outputs().size());
  }
}

}  // namespace
}  // namespace pooling
