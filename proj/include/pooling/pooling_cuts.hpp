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
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pooling/error.hpp"
#include "pooling/model.hpp"
#include "pooling/pq_formulation.hpp"
#include "pooling/relaxation.hpp"

namespace pooling {

// Excess parameters of one (pool, output, quality) triplet. Excess of input
// i at output j is P^U_jk - C_ik; eta ranges over the pool's inputs, beta
// over the other inputs that reach j.
struct TripletParams {
  std::string l, j, k;
  double eta_lo = 0.0, eta_hi = 0.0;
  double beta_lo = 0.0, beta_hi = 0.0;
  bool has_beta = false;
  double p_lo = 0.0, p_hi = 0.0;
  double c_j = 0.0;  // scaling capacity of output j
};

struct TripletVars {
  VarId u, t, p, r;
};

enum class PoolingCutKind { kConvex, kFractional };

// Auxiliary variables, rows and cut pool of the strengthened relaxation.
struct CutBlock {
  std::map<Pair, VarId> z;
  std::map<Pair, VarId> s;
  std::vector<TripletParams> params;  // sorted by (l, j, k)
  std::vector<TripletVars> vars;      // aligned with params
  std::vector<std::string> definition_rows;
  std::vector<std::string> inequality_rows;
  std::vector<std::string> cut_rows;
  std::set<std::uint64_t> cut_hashes;
};

namespace detail {

inline constexpr const char* kPoolingMarker = "pooling_inequalities";

inline std::string TripletName(const std::string& base, const TripletParams& tp) {
  return Name(base, {tp.l, tp.j, tp.k});
}

// Inputs that reach j other than through pool l.
inline std::set<std::string> OtherInputs(const Network& net, const std::string& l,
                                         const std::string& j) {
  std::set<std::string> out;
  for (const auto& i : net.output_inputs(j)) out.insert(i);
  for (const auto& other : net.output_pools(j)) {
    if (other == l) continue;
    for (const auto& i : net.pool_inputs(other)) out.insert(i);
  }
  return out;
}

}  // namespace detail

// Computes the triplet parameters for every (l, j, k) where j carries an
// upper quality bound on k.
inline std::vector<TripletParams> triplet_params(const PQModel& pq) {
  const Network& net = pq.net();
  std::vector<TripletParams> out;
  for (const auto& [l, j] : pq.index.lj) {
    const auto* upper = net.node(j).table(attr_keys::kQualityUpper);
    if (upper == nullptr) continue;
    for (const auto& [k, pu] : *upper) {
      TripletParams tp{l, j, k};
      tp.eta_lo = kInf;
      tp.eta_hi = -kInf;
      for (const auto& i : net.pool_inputs(l)) {
        const double e = pu - pq.input_quality(i, k);
        tp.eta_lo = std::min(tp.eta_lo, e);
        tp.eta_hi = std::max(tp.eta_hi, e);
      }
      tp.beta_lo = kInf;
      tp.beta_hi = -kInf;
      for (const auto& i : detail::OtherInputs(net, l, j)) {
        const double e = pu - pq.input_quality(i, k);
        tp.beta_lo = std::min(tp.beta_lo, e);
        tp.beta_hi = std::max(tp.beta_hi, e);
        tp.has_beta = true;
      }
      if (!tp.has_beta) tp.beta_lo = tp.beta_hi = 0.0;
      tp.p_lo = tp.eta_lo;
      tp.p_hi = tp.eta_hi;
      tp.c_j = pq.capacities.output.at(j);
      out.push_back(std::move(tp));
    }
  }
  return out;
}

// Installs the auxiliary variables, their defining rows, the envelope of
// r = s*p and the static linear inequalities. All flows are scaled by the
// output capacity c_j so that s + z/c_j <= 1.
inline CutBlock add_all_pooling_inequalities(RelaxedModel& rm, const PQModel& pq) {
  using detail::Name;
  Model& lp = rm.lp;
  if (lp.find_variable(detail::kPoolingMarker)) {
    throw Error(ErrorCode::kAlreadyInstalled, "pooling inequalities are already installed");
  }
  const Network& net = pq.net();
  CutBlock cb;
  std::vector<TripletParams> all = triplet_params(pq);
  for (const auto& tp : all) {
    if (!std::isfinite(tp.c_j)) {
      throw Error(ErrorCode::kUnboundedOutputCapacity,
                  "output '" + tp.j + "' has no finite inflow capacity");
    }
  }
  lp.add_variable(detail::kPoolingMarker, 0.0, 0.0);

  auto define = [&](const std::string& name, LinearExpr e) {
    lp.add_linear(name, std::move(e), Sense::kEqual, 0.0);
    cb.definition_rows.push_back(name);
  };

  for (const auto& [l, j] : pq.index.lj) {
    const double c_j = pq.capacities.output.at(j);
    if (!std::isfinite(c_j)) {
      throw Error(ErrorCode::kUnboundedOutputCapacity,
                  "output '" + j + "' has no finite inflow capacity");
    }
    if (!(c_j > 0.0)) continue;
    double z_hi = 0.0;
    LinearExpr ze;
    for (const auto& i : net.output_inputs(j)) {
      ze.add(pq.y_bypass.at({i, j}), -1.0);
      z_hi += pq.model.variable(pq.y_bypass.at({i, j})).upper;
    }
    for (const auto& other : net.output_pools(j)) {
      if (other == l) continue;
      ze.add(pq.y_pool.at({other, j}), -1.0);
      z_hi += pq.model.variable(pq.y_pool.at({other, j})).upper;
    }
    const VarId z = lp.add_variable(Name("z", {l, j}), 0.0, std::min(z_hi, c_j));
    ze.add(z, 1.0);
    define(Name("pooling_z", {l, j}), std::move(ze));
    cb.z[{l, j}] = z;

    const VarId s = lp.add_variable(Name("s", {l, j}), 0.0, 1.0);
    LinearExpr se;
    se.add(s, 1.0);
    for (const auto& i : net.pool_inputs(l)) se.add(pq.v.at({i, l, j}), -1.0 / c_j);
    define(Name("pooling_s", {l, j}), std::move(se));
    cb.s[{l, j}] = s;
  }

  for (const auto& tp : all) {
    auto sit = cb.s.find({tp.l, tp.j});
    if (sit == cb.s.end()) continue;
    const VarId s = sit->second;
    const double pu = pq.quality_upper(tp.j, tp.k);
    const double c_j = tp.c_j;
    using detail::TripletName;

    const VarId p = lp.add_variable(TripletName("p", tp), tp.p_lo, tp.p_hi);
    LinearExpr pe;
    pe.add(p, 1.0);
    for (const auto& i : net.pool_inputs(tp.l)) {
      pe.add(pq.q.at({i, tp.l}), -(pu - pq.input_quality(i, tp.k)));
    }
    define(TripletName("pooling_p", tp), std::move(pe));

    const VarId u = lp.add_variable(TripletName("u", tp), std::min(tp.eta_lo, 0.0),
                                    std::max(tp.eta_hi, 0.0));
    LinearExpr ue;
    ue.add(u, 1.0);
    for (const auto& i : net.pool_inputs(tp.l)) {
      ue.add(pq.v.at({i, tp.l, tp.j}), -(pu - pq.input_quality(i, tp.k)) / c_j);
    }
    define(TripletName("pooling_u", tp), std::move(ue));

    const VarId t = lp.add_variable(TripletName("t", tp), std::min(tp.beta_lo, 0.0),
                                    std::max(tp.beta_hi, 0.0));
    LinearExpr te;
    te.add(t, 1.0);
    for (const auto& i : net.output_inputs(tp.j)) {
      te.add(pq.y_bypass.at({i, tp.j}), -(pu - pq.input_quality(i, tp.k)) / c_j);
    }
    for (const auto& other : net.output_pools(tp.j)) {
      if (other == tp.l) continue;
      for (const auto& i : net.pool_inputs(other)) {
        te.add(pq.v.at({i, other, tp.j}), -(pu - pq.input_quality(i, tp.k)) / c_j);
      }
    }
    define(TripletName("pooling_t", tp), std::move(te));

    const VarId r = EnvelopeFor(rm, s, p, TripletName("pooling_r", tp));
    LinearExpr link;
    link.add(u, 1.0);
    link.add(r, -1.0);
    define(TripletName("pooling_r", tp), std::move(link));

    const double elo = tp.eta_lo, ehi = tp.eta_hi, blo = tp.beta_lo, bhi = tp.beta_hi;
    if (tp.has_beta && bhi > 0.0) {
      // (bhi - ehi)(u - elo s) <= bhi (p - elo)
      LinearExpr e;
      e.add(u, bhi - ehi);
      e.add(s, -(bhi - ehi) * elo);
      e.add(p, -bhi);
      const std::string name = TripletName("pooling_ineq_pool", tp);
      lp.add_linear(name, std::move(e), Sense::kLessEqual, -bhi * elo);
      cb.inequality_rows.push_back(name);
    }
    if (tp.has_beta && blo < 0.0) {
      // -(ehi - elo) t - ehi (u - elo s) + blo (u - ehi s) <= blo (p - ehi)
      LinearExpr e;
      e.add(t, -(ehi - elo));
      e.add(u, -ehi + blo);
      e.add(s, ehi * elo - blo * ehi);
      e.add(p, -blo);
      const std::string name = TripletName("pooling_ineq_other", tp);
      lp.add_linear(name, std::move(e), Sense::kLessEqual, -blo * ehi);
      cb.inequality_rows.push_back(name);
    }
    cb.params.push_back(tp);
    cb.vars.push_back(TripletVars{u, t, p, r});
  }
  return cb;
}

struct PoolingCut {
  PoolingCutKind kind;
  std::size_t triplet;  // index into CutBlock::params
  LinearExpr expr;      // cut reads expr <= rhs
  double rhs = 0.0;
  double violation = 0.0;
};

namespace detail {

inline PoolingCut Linearize(PoolingCutKind kind, std::size_t triplet, double value,
                            std::span<const std::pair<VarId, double>> grad,
                            std::span<const double> at) {
  PoolingCut cut{kind, triplet, {}, -value, value};
  for (const auto& [var, g] : grad) {
    cut.expr.add(var, g);
    cut.rhs += g * at[var.value];
  }
  return cut;
}

}  // namespace detail

// Gradient cuts of the two convex nonlinear pooling inequalities, for every
// triplet whose inequality is violated by more than eps at `point`.
inline std::vector<PoolingCut> generate_valid_cuts(const CutBlock& cb,
                                                   std::span<const double> point,
                                                   double eps = 1e-5) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  std::vector<PoolingCut> cuts;
  for (std::size_t n = 0; n < cb.params.size(); ++n) {
    const TripletParams& tp = cb.params[n];
    const TripletVars& tv = cb.vars[n];
    const VarId sv = cb.s.at({tp.l, tp.j});
    const std::string where = detail::TripletName("pooling cut", tp);
    const double s = detail::ValueAt(point, sv, where);
    const double u = detail::ValueAt(point, tv.u, where);
    const double t = detail::ValueAt(point, tv.t, where);
    const double p = detail::ValueAt(point, tv.p, where);
    if (!tp.has_beta) continue;
    const double elo = tp.eta_lo, ehi = tp.eta_hi, blo = tp.beta_lo, bhi = tp.beta_hi;

    // h = p - ehi + (bhi s - u)(ehi s - u) / (bhi s) <= 0, convex for s > 0.
    if (bhi > 0.0 && s > 1e-8) {
      const double a = bhi * s - u;
      const double b = ehi * s - u;
      const double h = p - ehi + a * b / (bhi * s);
      if (h > eps) {
        const double dn_ds = bhi * b + ehi * a;
        const double dn_du = -(a + b);
        const double ds = dn_ds / (bhi * s) - a * b / (bhi * s * s);
        const double du = dn_du / (bhi * s);
        const std::pair<VarId, double> grad[] = {{sv, ds}, {tv.u, du}, {tv.p, 1.0}};
        cuts.push_back(detail::Linearize(PoolingCutKind::kConvex, n, h, grad, point));
      }
    }

    // F = -(ehi - elo) t - blo (u - elo s) - ehi phi + blo (p - elo) <= 0
    // with phi = t' a / (t' + a), t' = -t, a = ehi s - u.
    if (blo < 0.0 && ehi > 0.0 && elo <= 0.0 && t < 0.0) {
      const double tp_ = -t;
      const double a = ehi * s - u;
      const double d = tp_ + a;
      if (d > 1e-8 && a >= 0.0) {
        const double phi = tp_ * a / d;
        const double f = -(ehi - elo) * t - blo * (u - elo * s) - ehi * phi + blo * (p - elo);
        if (f > eps) {
          const double dphi_dtp = a * a / (d * d);
          const double dphi_da = tp_ * tp_ / (d * d);
          const double dt = -(ehi - elo) + ehi * dphi_dtp;
          const double ds = blo * elo - ehi * dphi_da * ehi;
          const double du = -blo + ehi * dphi_da;
          const std::pair<VarId, double> grad[] = {{tv.t, dt}, {sv, ds}, {tv.u, du}, {tv.p, blo}};
          cuts.push_back(detail::Linearize(PoolingCutKind::kFractional, n, f, grad, point));
        }
      }
    }
  }
  return cuts;
}

namespace detail {

inline std::uint64_t CutHash(const PoolingCut& cut) {
  double scale = std::abs(cut.rhs);
  for (const auto& [var, c] : cut.expr.terms()) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) scale = 1.0;
  auto quantize = [&](double x) { return static_cast<std::int64_t>(std::llround(x / scale * 1e9)); };
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (const auto& [var, c] : cut.expr.terms()) {
    mix(var.value);
    mix(static_cast<std::uint64_t>(quantize(c)));
  }
  mix(static_cast<std::uint64_t>(quantize(cut.rhs)));
  return h;
}

}  // namespace detail

// Generates cuts at `point` and appends the ones not seen before to rm.lp.
inline std::size_t add_valid_cuts(CutBlock& cb, RelaxedModel& rm, std::span<const double> point,
                                  double eps = 1e-5) {
  if (eps == kInf) return 0;
  std::size_t added = 0;
  for (auto& cut : generate_valid_cuts(cb, point, eps)) {
    if (!cb.cut_hashes.insert(detail::CutHash(cut)).second) continue;
    const TripletParams& tp = cb.params[cut.triplet];
    const char* base = cut.kind == PoolingCutKind::kConvex ? "pooling_cut_convex" : "pooling_cut_frac";
    const std::string name = detail::Name(base, {tp.l, tp.j, tp.k, std::to_string(cb.cut_rows.size())});
    rm.lp.add_linear(name, std::move(cut.expr), Sense::kLessEqual, cut.rhs);
    cb.cut_rows.push_back(name);
    ++added;
  }
  return added;
}

}  // namespace pooling
