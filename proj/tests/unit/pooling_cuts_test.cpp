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

#include <gtest/gtest.h>

#include "pooling/pooling_cuts.hpp"
#include "pooling/pq_formulation.hpp"
#include "pooling/relaxation.hpp"
#include "pooling/solve/lp_simplex.hpp"
#include "support/fixtures.hpp"
#include "support/grid_oracle.hpp"
#include "support/lift.hpp"

namespace pooling {
namespace {

const TripletParams& Find(const std::vector<TripletParams>& all, const std::string& l,
                          const std::string& j) {
  for (const auto& tp : all) {
    if (tp.l == l && tp.j == j) return tp;
  }
  throw std::runtime_error("missing triplet");
}

struct Strengthened {
  PQModel pq;
  RelaxedModel rm;
  CutBlock cb;
  std::vector<double> bounds;  // LP bound after each round
};

Strengthened RunCutLoop(const Network& net, int rounds) {
  Strengthened s{build_pq(net), {}, {}, {}};
  s.rm = relax(s.pq.model);
  s.cb = add_all_pooling_inequalities(s.rm, s.pq);
  for (int round = 0; round <= rounds; ++round) {
    const LPResult r = solve_lp(s.rm.lp);
    if (r.status != LPStatus::kOptimal) break;
    s.bounds.push_back(r.objective);
    if (round == rounds || add_valid_cuts(s.cb, s.rm, r.values) == 0) break;
  }
  return s;
}

TEST(PoolingCutsTest, H1TripletParameters) {
  const PQModel pq = build_pq(testing::MakeH1());
  const auto all = triplet_params(pq);
  ASSERT_EQ(all.size(), 2u);
  const TripletParams& j2 = Find(all, "l1", "j2");
  EXPECT_EQ(j2.k, "sulfur");
  EXPECT_DOUBLE_EQ(j2.eta_lo, -1.5);
  EXPECT_DOUBLE_EQ(j2.eta_hi, 0.5);
  EXPECT_DOUBLE_EQ(j2.beta_lo, -0.5);
  EXPECT_DOUBLE_EQ(j2.beta_hi, -0.5);
  EXPECT_TRUE(j2.has_beta);
  EXPECT_DOUBLE_EQ(j2.c_j, 200.0);
  const TripletParams& j1 = Find(all, "l1", "j1");
  EXPECT_DOUBLE_EQ(j1.eta_lo, -0.5);
  EXPECT_DOUBLE_EQ(j1.eta_hi, 1.5);
  EXPECT_DOUBLE_EQ(j1.beta_lo, 0.5);
  EXPECT_DOUBLE_EQ(j1.beta_hi, 0.5);
}

TEST(PoolingCutsTest, H1InequalityRowsFollowBetaSigns) {
  const PQModel pq = build_pq(testing::MakeH1());
  RelaxedModel rm = relax(pq.model);
  const CutBlock cb = add_all_pooling_inequalities(rm, pq);
  EXPECT_EQ(cb.inequality_rows,
            (std::vector<std::string>{"pooling_ineq_pool[l1,j1,sulfur]",
                                      "pooling_ineq_other[l1,j2,sulfur]"}));
  EXPECT_TRUE(rm.lp.find_variable("z[l1,j1]").has_value());
  EXPECT_TRUE(rm.lp.find_variable("s[l1,j2]").has_value());
  EXPECT_TRUE(rm.lp.find_variable("u[l1,j2,sulfur]").has_value());
  EXPECT_TRUE(rm.lp.has_constraint("pooling_t[l1,j1,sulfur]"));
  EXPECT_TRUE(cb.cut_rows.empty());
}

TEST(PoolingCutsTest, OutputWithoutOtherInputsHasNoInequality) {
  Network n("single");
  n.add_node(NodeLayer::kInput, "a", std::nullopt, std::nullopt, 1.0,
             AttributeMap{{attr_keys::kQuality, {{"k", 1.0}}}});
  n.add_node(NodeLayer::kInput, "b", std::nullopt, std::nullopt, 2.0,
             AttributeMap{{attr_keys::kQuality, {{"k", 3.0}}}});
  n.add_node(NodeLayer::kPool, "l", 0.0, 50.0);
  n.add_node(NodeLayer::kOutput, "j", 0.0, 40.0, 5.0,
             AttributeMap{{attr_keys::kQualityUpper, {{"k", 2.0}}}});
  n.add_edge("a", "l");
  n.add_edge("b", "l");
  n.add_edge("l", "j");
  n.freeze();
  const PQModel pq = build_pq(n);
  const auto all = triplet_params(pq);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_FALSE(all[0].has_beta);
  EXPECT_EQ(all[0].beta_lo, 0.0);
  EXPECT_EQ(all[0].beta_hi, 0.0);
  RelaxedModel rm = relax(pq.model);
  const CutBlock cb = add_all_pooling_inequalities(rm, pq);
  EXPECT_TRUE(cb.inequality_rows.empty());
  const LPResult r = solve_lp(rm.lp);
  ASSERT_EQ(r.status, LPStatus::kOptimal);
  EXPECT_TRUE(generate_valid_cuts(cb, r.values).empty());
}

TEST(PoolingCutsTest, SecondInstallIsRejected) {
  const PQModel pq = build_pq(testing::MakeH1());
  RelaxedModel rm = relax(pq.model);
  add_all_pooling_inequalities(rm, pq);
  try {
    add_all_pooling_inequalities(rm, pq);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlreadyInstalled);
  }
}

TEST(PoolingCutsTest, UnboundedOutputIsRejected) {
  Network n("open");
  n.add_node(NodeLayer::kInput, "a", std::nullopt, std::nullopt, 1.0,
             AttributeMap{{attr_keys::kQuality, {{"k", 1.0}}}});
  n.add_node(NodeLayer::kInput, "b", std::nullopt, std::nullopt, 2.0,
             AttributeMap{{attr_keys::kQuality, {{"k", 3.0}}}});
  n.add_node(NodeLayer::kPool, "l", 0.0, 50.0);
  n.add_node(NodeLayer::kOutput, "j", std::nullopt, std::nullopt, 5.0,
             AttributeMap{{attr_keys::kQualityUpper, {{"k", 2.0}}}});
  n.add_edge("a", "l");
  n.add_edge("b", "l");
  n.add_edge("l", "j");
  n.add_edge("b", "j");
  n.freeze();
  const PQModel pq = build_pq(n);
  RelaxedModel rm = relax(pq.model);
  try {
    add_all_pooling_inequalities(rm, pq);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnboundedOutputCapacity);
  }
}

TEST(PoolingCutsTest, GeneratedCutsAreViolatedByEps) {
  const PQModel pq = build_pq(testing::MakeH1());
  RelaxedModel rm = relax(pq.model);
  const CutBlock cb = add_all_pooling_inequalities(rm, pq);
  const LPResult r = solve_lp(rm.lp);
  ASSERT_EQ(r.status, LPStatus::kOptimal);
  const auto cuts = generate_valid_cuts(cb, r.values, 1e-5);
  ASSERT_FALSE(cuts.empty());
  for (const auto& cut : cuts) {
    EXPECT_GE(cut.violation, 1e-5);
    double lhs = 0.0;
    for (const auto& [var, c] : cut.expr.terms()) lhs += c * r.values[var.value];
    EXPECT_NEAR(lhs - cut.rhs, cut.violation, 1e-9);
  }
  for (const auto& cut : generate_valid_cuts(cb, r.values, 1e6)) {
    ADD_FAILURE() << "cut with violation " << cut.violation << " above huge eps";
  }
}

TEST(PoolingCutsTest, EpsArguments) {
  const PQModel pq = build_pq(testing::MakeH1());
  RelaxedModel rm = relax(pq.model);
  CutBlock cb = add_all_pooling_inequalities(rm, pq);
  const LPResult r = solve_lp(rm.lp);
  const std::size_t rows = rm.lp.num_constraints();
  EXPECT_EQ(add_valid_cuts(cb, rm, r.values, kInf), 0u);
  EXPECT_EQ(rm.lp.num_constraints(), rows);
  try {
    generate_valid_cuts(cb, r.values, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(PoolingCutsTest, DuplicateCutsAreSkipped) {
  const PQModel pq = build_pq(testing::MakeH1());
  RelaxedModel rm = relax(pq.model);
  CutBlock cb = add_all_pooling_inequalities(rm, pq);
  const LPResult r = solve_lp(rm.lp);
  const std::size_t first = add_valid_cuts(cb, rm, r.values);
  EXPECT_GT(first, 0u);
  EXPECT_EQ(add_valid_cuts(cb, rm, r.values), 0u);
  EXPECT_EQ(cb.cut_rows.size(), first);
}

TEST(PoolingCutsTest, NoFractionalCutWithoutOtherFlow) {
  const PQModel pq = build_pq(testing::MakeH1());
  RelaxedModel rm = relax(pq.model);
  const CutBlock cb = add_all_pooling_inequalities(rm, pq);
  LPResult r = solve_lp(rm.lp);
  for (const auto& tv : cb.vars) r.values[tv.t.value] = 0.0;
  for (const auto& cut : generate_valid_cuts(cb, r.values, 1e-9)) {
    EXPECT_EQ(cut.kind, PoolingCutKind::kConvex);
  }
}

TEST(PoolingCutsTest, H1CutLoopIsMonotoneAndValid) {
  const Strengthened s = RunCutLoop(testing::MakeH1(), 20);
  ASSERT_GE(s.bounds.size(), 2u);
  for (std::size_t n = 1; n < s.bounds.size(); ++n) EXPECT_GE(s.bounds[n], s.bounds[n - 1] - 1e-7);
  EXPECT_LE(s.bounds.back(), -400.0 + 1e-6);
  EXPECT_GT(s.bounds.back(), s.bounds.front() + 1.0);
}

// Every row of the strengthened relaxation must hold at feasible points of
// the original problem, lifted with exact auxiliary values.
TEST(PoolingCutsTest, RowsHoldAtFeasiblePoints) {
  std::vector<Network> nets{testing::MakeH1()};
  for (std::uint64_t seed = 1; seed <= 6; ++seed) nets.push_back(testing::MakeTiny(seed));
  testing::TestRng rng(5);
  for (const auto& net : nets) {
    Strengthened s = RunCutLoop(net, 5);
    int checked = 0;
    for (int sample = 0; sample < 40; ++sample) {
      testing::Composition q;
      for (const auto& l : net.pools()) {
        const auto ins = net.predecessors(l, NodeLayer::kInput);
        double total = 0.0;
        std::map<std::string, double> shares;
        for (const auto& i : ins) total += (shares[i] = rng.Uniform(0.0, 1.0) + 1e-3);
        for (auto& [i, v] : shares) v /= total;
        q[l] = shares;
      }
      auto weights = [&](const std::string&, const std::string&) { return rng.Uniform(-20.0, 5.0); };
      const auto flows = testing::SolveFixedComposition(net, q, weights);
      if (!flows) continue;
      const auto original = testing::PqPoint(s.pq, *flows);
      ASSERT_TRUE(is_feasible(s.pq.model, original, 1e-6).feasible);
      const auto lifted = testing::Lift(s.rm, &s.cb, original);
      const FeasibilityReport report = is_feasible(s.rm.lp, lifted, 1e-7);
      EXPECT_TRUE(report.feasible) << net.name() << " row " << report.worst << " residual "
                                   << report.worst_residual;
      ++checked;
    }
    EXPECT_GT(checked, 0) << net.name();
  }
}

}  // namespace
}  // namespace pooling
