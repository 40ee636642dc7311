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

#include "pooling/pq_formulation.hpp"
#include "pooling/relaxation.hpp"
#include "pooling/solve/lp_simplex.hpp"
#include "support/fixtures.hpp"
#include "support/vertex_lp.hpp"

namespace pooling {
namespace {

LinearExpr Expr(std::initializer_list<std::pair<VarId, double>> terms) {
  LinearExpr e;
  for (const auto& [v, c] : terms) e.add(v, c);
  return e;
}

TEST(LpSimplexTest, SmallMaximization) {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  x = 1.6, y = 1.2.
  Model m;
  const VarId x = m.add_variable("x", 0.0, kInf);
  const VarId y = m.add_variable("y", 0.0, kInf);
  m.add_linear("a", Expr({{x, 1.0}, {y, 2.0}}), Sense::kLessEqual, 4.0);
  m.add_linear("b", Expr({{x, 3.0}, {y, 1.0}}), Sense::kLessEqual, 6.0);
  m.objective() = Expr({{x, -1.0}, {y, -1.0}});
  const LPResult r = solve_lp(m);
  ASSERT_EQ(r.status, LPStatus::kOptimal);
  EXPECT_NEAR(r.objective, -2.8, 1e-9);
  EXPECT_NEAR(r.values[0], 1.6, 1e-9);
  EXPECT_NEAR(r.values[1], 1.2, 1e-9);
}

TEST(LpSimplexTest, EqualityAndGreaterRows) {
  Model m;
  const VarId x = m.add_variable("x", -5.0, 5.0);
  const VarId y = m.add_variable("y", -5.0, 5.0);
  m.add_linear("sum", Expr({{x, 1.0}, {y, 1.0}}), Sense::kEqual, 1.0);
  m.add_linear("diff", Expr({{x, 1.0}, {y, -1.0}}), Sense::kGreaterEqual, 3.0);
  m.objective() = Expr({{x, 1.0}});
  const LPResult r = solve_lp(m);
  ASSERT_EQ(r.status, LPStatus::kOptimal);
  EXPECT_NEAR(r.values[0], 2.0, 1e-9);
  EXPECT_NEAR(r.values[1], -1.0, 1e-9);
}

TEST(LpSimplexTest, InactiveRowsAreIgnored) {
  Model m;
  const VarId x = m.add_variable("x", 0.0, 10.0);
  m.add_linear("cap", Expr({{x, 1.0}}), Sense::kLessEqual, 1.0).active = false;
  m.objective() = Expr({{x, -1.0}});
  EXPECT_NEAR(solve_lp(m).objective, -10.0, 1e-9);
}

TEST(LpSimplexTest, FixedVariablesAndConstants) {
  Model m;
  const VarId x = m.add_variable("x", 2.0, 2.0);
  const VarId y = m.add_variable("y", 0.0, 10.0);
  LinearExpr row = Expr({{x, 1.0}, {y, 1.0}});
  row.add_constant(1.0);
  m.add_linear("r", row, Sense::kLessEqual, 5.0);
  LinearExpr obj = Expr({{y, -1.0}});
  obj.add_constant(7.0);
  m.objective() = obj;
  const LPResult r = solve_lp(m);
  ASSERT_EQ(r.status, LPStatus::kOptimal);
  EXPECT_NEAR(r.values[1], 2.0, 1e-9);
  EXPECT_NEAR(r.objective, 5.0, 1e-9);
}

TEST(LpSimplexTest, DetectsInfeasible) {
  Model m;
  const VarId x = m.add_variable("x", 0.0, 1.0);
  m.add_linear("r", Expr({{x, 1.0}}), Sense::kGreaterEqual, 2.0);
  EXPECT_EQ(solve_lp(m).status, LPStatus::kInfeasible);
}

TEST(LpSimplexTest, DetectsUnbounded) {
  Model m;
  const VarId x = m.add_variable("x", 0.0, kInf);
  const VarId y = m.add_variable("y", -kInf, kInf);
  m.add_linear("r", Expr({{x, 1.0}, {y, -1.0}}), Sense::kLessEqual, 1.0);
  m.objective() = Expr({{x, -1.0}});
  EXPECT_EQ(solve_lp(m).status, LPStatus::kUnbounded);
}

TEST(LpSimplexTest, RejectsBilinearRows) {
  Model m;
  const VarId x = m.add_variable("x", 0.0, 1.0);
  m.add_constraint(Constraint{"c", {}, {BilinearTerm::Make(1.0, x, x)}, Sense::kLessEqual, 1.0, true});
  try {
    solve_lp(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(LpSimplexTest, MatchesVertexEnumerationOnRandomModels) {
  testing::TestRng rng(11);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    Model m;
    const std::size_t n = 2 + rng.Index(3);
    const std::size_t rows = 1 + rng.Index(4);
    std::vector<VarId> vars;
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = rng.Round2(-3.0, 1.0);
      vars.push_back(m.add_variable("x" + std::to_string(j), lo, lo + rng.Round2(0.5, 5.0)));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      LinearExpr e;
      for (VarId v : vars) {
        if (rng.Coin(0.7)) e.add(v, rng.Round2(-3.0, 3.0));
      }
      const int s = static_cast<int>(rng.Index(3));
      const Sense sense = s == 0 ? Sense::kLessEqual : s == 1 ? Sense::kGreaterEqual : Sense::kEqual;
      m.add_linear("r" + std::to_string(r), e, sense, rng.Round2(-2.0, 2.0));
    }
    LinearExpr obj;
    for (VarId v : vars) obj.add(v, rng.Round2(-2.0, 2.0));
    m.objective() = obj;
    const auto expected = testing::VertexEnumerationOptimum(m);
    const LPResult r = solve_lp(m);
    if (!expected) {
      EXPECT_EQ(r.status, LPStatus::kInfeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_EQ(r.status, LPStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, *expected, 1e-6 * (1.0 + std::abs(*expected))) << "trial " << trial;
    EXPECT_TRUE(is_feasible(m, r.values, 1e-7).feasible) << "trial " << trial;
    ++optimal;
  }
  EXPECT_GT(optimal, 30);
  EXPECT_GT(infeasible, 5);
}

TEST(LpSimplexTest, DegenerateCycleProneModel) {
  // Classic Beale example; Dantzig pricing without a safeguard cycles.
  Model m;
  std::vector<VarId> x;
  for (int j = 0; j < 4; ++j) x.push_back(m.add_variable("x" + std::to_string(j), 0.0, kInf));
  m.add_linear("a", Expr({{x[0], 0.25}, {x[1], -60.0}, {x[2], -0.04}, {x[3], 9.0}}), Sense::kLessEqual, 0.0);
  m.add_linear("b", Expr({{x[0], 0.5}, {x[1], -90.0}, {x[2], -0.02}, {x[3], 3.0}}), Sense::kLessEqual, 0.0);
  m.add_linear("c", Expr({{x[2], 1.0}}), Sense::kLessEqual, 1.0);
  m.objective() = Expr({{x[0], -0.75}, {x[1], 150.0}, {x[2], -0.02}, {x[3], 6.0}});
  const LPResult r = solve_lp(m);
  ASSERT_EQ(r.status, LPStatus::kOptimal);
  EXPECT_NEAR(r.objective, -0.05, 1e-9);
}

TEST(LpSimplexTest, H1RootRelaxationBoundsOptimum) {
  const PQModel pq = build_pq(testing::MakeH1());
  const RelaxedModel rm = relax(pq.model);
  const LPResult r = solve_lp(rm.lp);
  ASSERT_EQ(r.status, LPStatus::kOptimal);
  EXPECT_LE(r.objective, -400.0 + 1e-6);
  EXPECT_TRUE(is_feasible(rm.lp, r.values, 1e-6).feasible);
}

}  // namespace
}  // namespace pooling
