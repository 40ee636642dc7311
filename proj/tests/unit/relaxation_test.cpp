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

#include <array>
#include <functional>

#include <gtest/gtest.h>

#include "pooling/pq_formulation.hpp"
#include "pooling/relaxation.hpp"
#include "pooling/solve/lp_simplex.hpp"
#include "support/fixtures.hpp"

namespace pooling {
namespace {

struct Box {
  Model model;
  RelaxedModel rm;
  VarId x, y, w;
};

Box MakeBox(double xl, double xu, double yl, double yu) {
  Box b;
  b.x = b.model.add_variable("x", xl, xu);
  b.y = b.model.add_variable("y", yl, yu);
  Constraint c{"prod", {}, {BilinearTerm::Make(1.0, b.x, b.y)}, Sense::kLessEqual, 100.0, true};
  b.model.add_constraint(c);
  b.rm = relax(b.model);
  b.w = b.rm.envelopes.at(0).aux;
  return b;
}

// Range of w allowed by the four rows at fixed (x, y).
std::pair<double, double> EnvelopeRange(const RelaxedModel& rm, double x, double y) {
  const EnvelopeEntry& e = rm.envelopes.at(0);
  double lo = -kInf, hi = kInf;
  for (const auto& name : e.rows) {
    const Constraint& c = rm.lp.constraint(name);
    const double rest = c.linear.coefficient(e.x) * x + c.linear.coefficient(e.y) * y;
    const double bound = (c.rhs - rest) / c.linear.coefficient(e.aux);
    if (c.sense == Sense::kGreaterEqual) lo = std::max(lo, bound);
    if (c.sense == Sense::kLessEqual) hi = std::min(hi, bound);
  }
  return {lo, hi};
}

TEST(RelaxationTest, AppendixBoxAtOrigin) {
  const Box b = MakeBox(-2.0, 2.0, -3.0, 1.0);
  const auto [lo, hi] = EnvelopeRange(b.rm, 0.0, 0.0);
  EXPECT_NEAR(lo, -2.0, 1e-12);
  EXPECT_NEAR(hi, 2.0, 1e-12);
  const Variable& w = b.rm.lp.variable(b.w);
  EXPECT_EQ(w.lower, -6.0);
  EXPECT_EQ(w.upper, 6.0);
}

TEST(RelaxationTest, UnitBoxCornerIsExact) {
  const Box b = MakeBox(0.0, 1.0, 0.0, 1.0);
  const auto [lo, hi] = EnvelopeRange(b.rm, 1.0, 1.0);
  EXPECT_NEAR(lo, 1.0, 1e-12);
  EXPECT_NEAR(hi, 1.0, 1e-12);
}

TEST(RelaxationTest, MonteCarloContainment) {
  const Box b = MakeBox(0.0, 1.0, 0.0, 10.0);
  testing::TestRng rng(3);
  for (int n = 0; n < 1000; ++n) {
    const double x = rng.Uniform(0.0, 1.0), y = rng.Uniform(0.0, 10.0);
    const auto [lo, hi] = EnvelopeRange(b.rm, x, y);
    EXPECT_LE(lo, x * y + 1e-9);
    EXPECT_GE(hi, x * y - 1e-9);
  }
}

TEST(RelaxationTest, BilinearRowsBecomeLinear) {
  const PQModel pq = build_pq(testing::MakeH1());
  const RelaxedModel rm = relax(pq.model);
  EXPECT_FALSE(rm.lp.has_bilinear_constraints());
  for (const auto& c : rm.lp.constraints()) EXPECT_TRUE(c.bilinear.empty());
  // One shared product per (q, y) pair; the inactive pq_cut rows reuse them.
  EXPECT_EQ(rm.envelopes.size(), 4u);
  EXPECT_EQ(rm.num_original_variables, pq.model.num_variables());
  const Constraint& path = rm.lp.constraint("path_definition[i1,l1,j1]");
  EXPECT_EQ(path.linear.terms().size(), 2u);
}

TEST(RelaxationTest, ObjectiveIsCarriedOver) {
  const PQModel pq = build_pq(testing::MakeH1());
  const RelaxedModel rm = relax(pq.model);
  EXPECT_EQ(rm.lp.objective(), pq.model.objective());
}

TEST(RelaxationTest, BinariesAreRelaxed) {
  Model m;
  m.add_variable("b", 0.0, 1.0, Domain::kBinary);
  const RelaxedModel rm = relax(m);
  EXPECT_EQ(rm.lp.variables()[0].domain, Domain::kContinuous);
  EXPECT_EQ(rm.lp.variables()[0].upper, 1.0);
}

TEST(RelaxationTest, FixedFactorIsSubstituted) {
  Model m;
  const VarId x = m.add_variable("x", 2.0, 2.0);
  const VarId y = m.add_variable("y", 0.0, 5.0);
  m.add_constraint(Constraint{"c", {}, {BilinearTerm::Make(3.0, x, y)}, Sense::kLessEqual, 1.0, true});
  const RelaxedModel rm = relax(m);
  EXPECT_TRUE(rm.envelopes.empty());
  EXPECT_EQ(rm.lp.constraint("c").linear.coefficient(y), 6.0);
}

TEST(RelaxationTest, UnboundedFactorIsAnError) {
  Model m;
  const VarId x = m.add_variable("x", 0.0, kInf);
  const VarId y = m.add_variable("y", 0.0, 1.0);
  m.add_constraint(Constraint{"c", {}, {BilinearTerm::Make(1.0, x, y)}, Sense::kLessEqual, 1.0, true});
  try {
    relax(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnboundedBilinearVariable);
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(RelaxationTest, RefreshRewritesEnvelopeRows) {
  const Box b = MakeBox(0.0, 4.0, 0.0, 8.0);
  std::array<LinearExpr, 4> before;
  for (std::size_t k = 0; k < 4; ++k) before[k] = b.rm.lp.constraint(b.rm.envelopes[0].rows[k]).linear;
  const RelaxedModel halved = refresh_bounds(b.rm, {{b.y, VarBounds{0.0, 4.0}}});
  for (std::size_t k = 0; k < 4; ++k) {
    const Constraint& c = halved.lp.constraint(halved.envelopes[0].rows[k]);
    const bool changed = !(c.linear == before[k]) || c.rhs != b.rm.lp.constraint(b.rm.envelopes[0].rows[k]).rhs;
    // Rows with a y^L factor keep coefficients when only y^U moves; at
    // least the x coefficient tied to y^U changes.
    if (k == 1 || k == 3) {
      EXPECT_TRUE(changed) << k;
    }
  }
  EXPECT_EQ(halved.lp.variable(b.y).upper, 4.0);
  EXPECT_EQ(halved.lp.variable(b.w).upper, 16.0);
}

TEST(RelaxationTest, RefreshWithSameBoundsIsNoOp) {
  const PQModel pq = build_pq(testing::MakeH1());
  const RelaxedModel rm = relax(pq.model);
  std::map<VarId, VarBounds> same;
  for (std::size_t j = 0; j < rm.num_original_variables; ++j) {
    const Variable& v = rm.lp.variables()[j];
    same[VarId{j}] = VarBounds{v.lower, v.upper};
  }
  EXPECT_EQ(refresh_bounds(rm, same), rm);
}

TEST(RelaxationTest, RefreshRejectsWiderBounds) {
  const Box b = MakeBox(0.0, 1.0, 0.0, 1.0);
  try {
    refresh_bounds(b.rm, {{b.x, VarBounds{-1.0, 1.0}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBoundsWiden);
  }
}

TEST(RelaxationTest, TighterBoxNeverLowersH1Bound) {
  const PQModel pq = build_pq(testing::MakeH1());
  const RelaxedModel rm = relax(pq.model);
  const LPResult root = solve_lp(rm.lp);
  ASSERT_EQ(root.status, LPStatus::kOptimal);
  const VarId q = pq.q.at({"i1", "l1"});
  for (const VarBounds b : {VarBounds{0.25, 0.25}, VarBounds{0.0, 0.5}, VarBounds{0.5, 1.0}}) {
    const LPResult tight = solve_lp(refresh_bounds(rm, {{q, b}}).lp);
    if (tight.status == LPStatus::kOptimal) {
      EXPECT_GE(tight.objective, root.objective - 1e-9);
    }
  }
}

}  // namespace
}  // namespace pooling
