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
#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pooling/error.hpp"
#include "pooling/model.hpp"

namespace pooling {

// One auxiliary variable w = x*y and its four McCormick rows.
struct EnvelopeEntry {
  VarId aux;
  VarId x;
  VarId y;
  std::array<std::string, 4> rows;
  std::string source;  // first constraint that used the product
  bool operator==(const EnvelopeEntry&) const = default;
};

struct VarBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Linear relaxation. Original variables keep their ids; auxiliary variables
// are appended after them.
struct RelaxedModel {
  Model lp;
  std::vector<EnvelopeEntry> envelopes;
  std::map<std::pair<VarId, VarId>, std::size_t> product_index;
  std::size_t num_original_variables = 0;

  // Envelopes whose box depends on the variable.
  std::vector<std::size_t> envelopes_of(VarId var) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < envelopes.size(); ++e) {
      if (envelopes[e].x == var || envelopes[e].y == var) out.push_back(e);
    }
    return out;
  }

  bool operator==(const RelaxedModel& o) const {
    return lp == o.lp && envelopes == o.envelopes && product_index == o.product_index &&
           num_original_variables == o.num_original_variables;
  }
};

// Writes the envelope rows of w = x*y over [xl,xu] x [yl,yu] into `model`,
// creating them on first use:
//   w >= xl*y + x*yl - xl*yl      w >= xu*y + x*yu - xu*yu
//   w <= xu*y + x*yl - xu*yl      w <= xl*y + x*yu - xl*yu
inline void WriteMcCormickRows(Model& model, const EnvelopeEntry& entry, double xl, double xu,
                               double yl, double yu) {
  struct Plane {
    double cx, cy, rhs;
    Sense sense;
  };
  const std::array<Plane, 4> planes{{
      {-yl, -xl, -xl * yl, Sense::kGreaterEqual},
      {-yu, -xu, -xu * yu, Sense::kGreaterEqual},
      {-yl, -xu, -xu * yl, Sense::kLessEqual},
      {-yu, -xl, -xl * yu, Sense::kLessEqual},
  }};
  for (std::size_t k = 0; k < 4; ++k) {
    LinearExpr e;
    e.add(entry.aux, 1.0);
    e.add(entry.x, planes[k].cx);
    e.add(entry.y, planes[k].cy);
    if (model.has_constraint(entry.rows[k])) {
      Constraint& c = model.mutable_constraint(entry.rows[k]);
      c.linear = std::move(e);
      c.rhs = planes[k].rhs;
    } else {
      model.add_constraint(Constraint{entry.rows[k], std::move(e), {}, planes[k].sense,
                                      planes[k].rhs, true});
    }
  }
  const std::array<double, 4> corners{xl * yl, xl * yu, xu * yl, xu * yu};
  model.set_bounds(entry.aux, *std::min_element(corners.begin(), corners.end()),
                   *std::max_element(corners.begin(), corners.end()));
}

// Adds (or reuses) the auxiliary variable for x*y with its envelope.
inline VarId EnvelopeFor(RelaxedModel& rm, VarId x, VarId y, const std::string& source) {
  if (y < x) std::swap(x, y);
  auto it = rm.product_index.find({x, y});
  if (it != rm.product_index.end()) return rm.envelopes[it->second].aux;
  Model& lp = rm.lp;
  for (VarId v : {x, y}) {
    const Variable& var = lp.variable(v);
    if (!std::isfinite(var.lower) || !std::isfinite(var.upper)) {
      throw Error(ErrorCode::kUnboundedBilinearVariable,
                  "variable '" + var.name + "' needs finite bounds for its McCormick envelope");
    }
  }
  // Copies: adding the auxiliary variable below may reallocate the storage.
  const Variable vx = lp.variable(x);
  const Variable vy = lp.variable(y);
  const std::string product = vx.name + "*" + vy.name;
  EnvelopeEntry entry;
  entry.x = x;
  entry.y = y;
  entry.source = source;
  entry.aux = lp.add_variable("mc[" + product + "]", -kInf, kInf);
  for (std::size_t k = 0; k < 4; ++k) {
    entry.rows[k] = "mccormick[" + product + "," + std::to_string(k) + "]";
  }
  WriteMcCormickRows(lp, entry, vx.lower, vx.upper, vy.lower, vy.upper);
  rm.product_index[{x, y}] = rm.envelopes.size();
  rm.envelopes.push_back(std::move(entry));
  return rm.envelopes.back().aux;
}

namespace detail {

// Replaces bilinear terms by linear ones: fixed factors are substituted,
// everything else goes through an envelope.
inline void LinearizeInto(RelaxedModel& rm, std::span<const BilinearTerm> terms,
                          LinearExpr& out, const std::string& source) {
  for (const auto& t : terms) {
    const Variable& a = rm.lp.variable(t.var_a);
    const Variable& b = rm.lp.variable(t.var_b);
    if (a.lower == a.upper) {
      out.add(t.var_b, t.coefficient * a.lower);
    } else if (b.lower == b.upper) {
      out.add(t.var_a, t.coefficient * b.lower);
    } else {
      out.add(EnvelopeFor(rm, t.var_a, t.var_b, source), t.coefficient);
    }
  }
}

}  // namespace detail

// McCormick relaxation: every product gets one shared auxiliary variable,
// binaries are relaxed to [0,1].
inline RelaxedModel relax(const Model& model) {
  RelaxedModel rm;
  rm.num_original_variables = model.num_variables();
  for (const auto& v : model.variables()) {
    rm.lp.add_variable(v.name, v.lower, v.upper, Domain::kContinuous);
  }
  for (const auto& c : model.constraints()) {
    Constraint out{c.name, c.linear, {}, c.sense, c.rhs, c.active};
    detail::LinearizeInto(rm, c.bilinear, out.linear, c.name);
    rm.lp.add_constraint(std::move(out));
  }
  rm.lp.objective() = model.objective();
  detail::LinearizeInto(rm, model.objective_bilinear(), rm.lp.objective(), "objective");
  return rm;
}

// Tightens variable bounds in place and recomputes the envelopes that depend
// on them. Bounds may only shrink.
inline void RefreshBoundsInPlace(RelaxedModel& rm,
                                 const std::map<VarId, VarBounds>& new_bounds) {
  constexpr double kSlack = 1e-12;
  for (const auto& [var, b] : new_bounds) {
    const Variable& old = rm.lp.variable(var);
    if (b.lower < old.lower - kSlack || b.upper > old.upper + kSlack) {
      throw Error(ErrorCode::kBoundsWiden, "new bounds of '" + old.name + "' are wider");
    }
  }
  std::vector<bool> touched(rm.envelopes.size(), false);
  for (const auto& [var, b] : new_bounds) {
    const Variable& old = rm.lp.variable(var);
    if (b.lower == old.lower && b.upper == old.upper) continue;
    rm.lp.set_bounds(var, std::max(b.lower, old.lower), std::min(b.upper, old.upper));
    for (std::size_t e : rm.envelopes_of(var)) touched[e] = true;
  }
  for (std::size_t e = 0; e < rm.envelopes.size(); ++e) {
    if (!touched[e]) continue;
    const EnvelopeEntry& entry = rm.envelopes[e];
    const Variable& x = rm.lp.variable(entry.x);
    const Variable& y = rm.lp.variable(entry.y);
    WriteMcCormickRows(rm.lp, entry, x.lower, x.upper, y.lower, y.upper);
  }
}

inline RelaxedModel refresh_bounds(RelaxedModel rm, const std::map<VarId, VarBounds>& new_bounds) {
  RefreshBoundsInPlace(rm, new_bounds);
  return rm;
}

// |w - x*y| for one envelope at a point of the relaxation.
inline double EnvelopeGap(const EnvelopeEntry& e, std::span<const double> point) {
  return std::abs(point[e.aux.value] - point[e.x.value] * point[e.y.value]);
}

}  // namespace pooling
