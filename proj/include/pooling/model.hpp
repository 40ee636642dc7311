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
#include <compare>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pooling/error.hpp"

namespace pooling {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense index of a model variable.
struct VarId {
  std::size_t value = 0;
  auto operator<=>(const VarId&) const = default;
};

enum class Domain { kContinuous, kBinary };
enum class Sense { kLessEqual, kEqual, kGreaterEqual };

inline const char* ToString(Sense sense) {
  switch (sense) {
    case Sense::kLessEqual: return "<=";
    case Sense::kEqual: return "==";
    case Sense::kGreaterEqual: return ">=";
  }
  return "?";
}

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  Domain domain = Domain::kContinuous;
  bool operator==(const Variable&) const = default;
};

// Sparse linear expression plus constant. Zero coefficients are never stored.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}

  LinearExpr& add(VarId var, double coef) {
    if (coef == 0.0) return *this;
    auto [it, inserted] = terms_.emplace(var, coef);
    if (!inserted) {
      it->second += coef;
      if (it->second == 0.0) terms_.erase(it);
    }
    return *this;
  }
  LinearExpr& add(const LinearExpr& other, double scale = 1.0) {
    for (const auto& [var, coef] : other.terms_) add(var, scale * coef);
    constant_ += scale * other.constant_;
    return *this;
  }
  void set(VarId var, double coef) {
    if (coef == 0.0) {
      terms_.erase(var);
    } else {
      terms_[var] = coef;
    }
  }
  double coefficient(VarId var) const {
    auto it = terms_.find(var);
    return it == terms_.end() ? 0.0 : it->second;
  }
  void add_constant(double c) { constant_ += c; }
  void set_constant(double c) { constant_ = c; }
  double constant() const { return constant_; }
  const std::map<VarId, double>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  bool operator==(const LinearExpr&) const = default;

 private:
  std::map<VarId, double> terms_;
  double constant_ = 0.0;
};

// coefficient * var_a * var_b with var_a <= var_b.
struct BilinearTerm {
  double coefficient = 0.0;
  VarId var_a;
  VarId var_b;

  static BilinearTerm Make(double coefficient, VarId a, VarId b) {
    if (b < a) std::swap(a, b);
    return BilinearTerm{coefficient, a, b};
  }
  bool operator==(const BilinearTerm&) const = default;
};

struct Constraint {
  std::string name;
  LinearExpr linear;
  std::vector<BilinearTerm> bilinear;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  bool active = true;
  bool operator==(const Constraint&) const = default;
};

struct FeasibilityReport {
  bool feasible = true;
  double worst_residual = 0.0;
  // Name of the argmax-residual constraint, or "bounds[var]" for a bound.
  std::string worst;
};

// Minimization model with linear constraints and bilinear terms.
class Model {
 public:
  VarId add_variable(const std::string& name, double lower, double upper,
                     Domain domain = Domain::kContinuous) {
    if (var_index_.count(name) != 0) {
      throw Error(ErrorCode::kDuplicateName, "variable '" + name + "' already exists");
    }
    if (!(lower <= upper)) {
      throw Error(ErrorCode::kInvalidBounds, "variable '" + name + "': lower > upper");
    }
    if (domain == Domain::kBinary && (lower < 0.0 || upper > 1.0)) {
      throw Error(ErrorCode::kInvalidBounds, "binary '" + name + "' outside [0,1]");
    }
    VarId id{variables_.size()};
    variables_.push_back(Variable{name, lower, upper, domain});
    var_index_.emplace(name, id);
    return id;
  }

  Constraint& add_constraint(Constraint c) {
    if (con_index_.count(c.name) != 0) {
      throw Error(ErrorCode::kDuplicateName, "constraint '" + c.name + "' already exists");
    }
    for (auto& b : c.bilinear) b = BilinearTerm::Make(b.coefficient, b.var_a, b.var_b);
    check_ids(c);
    con_index_.emplace(c.name, constraints_.size());
    constraints_.push_back(std::move(c));
    return constraints_.back();
  }

  Constraint& add_linear(const std::string& name, LinearExpr expr, Sense sense, double rhs) {
    return add_constraint(Constraint{name, std::move(expr), {}, sense, rhs, true});
  }

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }

  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(VarId id) const { return variables_.at(id.value); }
  std::optional<VarId> find_variable(const std::string& name) const {
    auto it = var_index_.find(name);
    if (it == var_index_.end()) return std::nullopt;
    return it->second;
  }
  VarId variable_id(const std::string& name) const {
    auto id = find_variable(name);
    if (!id) throw Error(ErrorCode::kUnknownVariable, "no variable named '" + name + "'");
    return *id;
  }

  void set_bounds(VarId id, double lower, double upper) {
    Variable& v = variables_.at(id.value);
    if (!(lower <= upper)) {
      throw Error(ErrorCode::kInvalidBounds, "variable '" + v.name + "': lower > upper");
    }
    v.lower = lower;
    v.upper = upper;
  }
  void set_domain(VarId id, Domain domain) { variables_.at(id.value).domain = domain; }

  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::vector<Constraint>& mutable_constraints() { return constraints_; }

  bool has_constraint(const std::string& name) const { return con_index_.count(name) != 0; }
  const Constraint& constraint(const std::string& name) const {
    return constraints_[constraint_index(name)];
  }
  Constraint& mutable_constraint(const std::string& name) {
    return constraints_[constraint_index(name)];
  }
  std::size_t constraint_index(const std::string& name) const {
    auto it = con_index_.find(name);
    if (it == con_index_.end()) {
      throw Error(ErrorCode::kUnknownConstraint, "no constraint named '" + name + "'");
    }
    return it->second;
  }

  void set_active(const std::string& name, bool active) {
    mutable_constraint(name).active = active;
  }
  void deactivate(const std::string& name) { set_active(name, false); }
  void activate(const std::string& name) { set_active(name, true); }

  LinearExpr& objective() { return objective_; }
  const LinearExpr& objective() const { return objective_; }
  std::vector<BilinearTerm>& objective_bilinear() { return objective_bilinear_; }
  const std::vector<BilinearTerm>& objective_bilinear() const { return objective_bilinear_; }

  // Drops every variable/constraint appended after the given counts.
  void truncate(std::size_t num_variables, std::size_t num_constraints) {
    while (constraints_.size() > num_constraints) {
      con_index_.erase(constraints_.back().name);
      constraints_.pop_back();
    }
    while (variables_.size() > num_variables) {
      var_index_.erase(variables_.back().name);
      variables_.pop_back();
    }
  }

  bool has_bilinear_constraints() const {
    return std::any_of(constraints_.begin(), constraints_.end(), [](const Constraint& c) {
      return c.active && !c.bilinear.empty();
    });
  }
  bool has_binaries() const {
    return std::any_of(variables_.begin(), variables_.end(),
                       [](const Variable& v) { return v.domain == Domain::kBinary; });
  }

  friend bool operator==(const Model& a, const Model& b) {
    return a.variables_ == b.variables_ && a.constraints_ == b.constraints_ &&
           a.objective_ == b.objective_ && a.objective_bilinear_ == b.objective_bilinear_;
  }

 private:
  void check_ids(const Constraint& c) const {
    for (const auto& [var, coef] : c.linear.terms()) {
      if (var.value >= variables_.size()) {
        throw Error(ErrorCode::kUnknownVariable, "constraint '" + c.name + "' references unknown variable");
      }
    }
    for (const auto& b : c.bilinear) {
      if (b.var_b.value >= variables_.size()) {
        throw Error(ErrorCode::kUnknownVariable, "constraint '" + c.name + "' references unknown variable");
      }
    }
  }

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, VarId> var_index_;
  std::unordered_map<std::string, std::size_t> con_index_;
  LinearExpr objective_;
  std::vector<BilinearTerm> objective_bilinear_;
};

// Points are dense vectors indexed by VarId; NaN marks a missing value.
using Point = std::vector<double>;

namespace detail {

inline double ValueAt(std::span<const double> point, VarId id, const std::string& where) {
  if (id.value >= point.size() || std::isnan(point[id.value])) {
    throw Error(ErrorCode::kMissingVariableValue,
                "no value for variable #" + std::to_string(id.value) + " in " + where);
  }
  return point[id.value];
}

}  // namespace detail

inline double Evaluate(const LinearExpr& expr, std::span<const double> point,
                       const std::string& where = "expression") {
  double sum = expr.constant();
  for (const auto& [var, coef] : expr.terms()) sum += coef * detail::ValueAt(point, var, where);
  return sum;
}

inline double Evaluate(std::span<const BilinearTerm> terms, std::span<const double> point,
                       const std::string& where = "expression") {
  double sum = 0.0;
  for (const auto& t : terms) {
    sum += t.coefficient * detail::ValueAt(point, t.var_a, where) *
           detail::ValueAt(point, t.var_b, where);
  }
  return sum;
}

inline double LeftHandSide(const Constraint& c, std::span<const double> point) {
  return Evaluate(c.linear, point, c.name) + Evaluate(c.bilinear, point, c.name);
}

inline double Residual(const Constraint& c, std::span<const double> point) {
  const double diff = LeftHandSide(c, point) - c.rhs;
  switch (c.sense) {
    case Sense::kLessEqual: return std::max(0.0, diff);
    case Sense::kEqual: return std::abs(diff);
    case Sense::kGreaterEqual: return std::max(0.0, -diff);
  }
  return 0.0;
}

// Violation of the named constraint at point (0 when satisfied).
inline double residual(const Model& model, std::span<const double> point,
                       const std::string& constraint_name) {
  return Residual(model.constraint(constraint_name), point);
}

inline double ObjectiveValue(const Model& model, std::span<const double> point) {
  return Evaluate(model.objective(), point, "objective") +
         Evaluate(model.objective_bilinear(), point, "objective");
}

inline FeasibilityReport is_feasible(const Model& model, std::span<const double> point,
                                     double tol = 1e-6) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
  FeasibilityReport report;
  auto consider = [&](double r, const std::string& name) {
    if (r > report.worst_residual) {
      report.worst_residual = r;
      report.worst = name;
    }
  };
  for (std::size_t i = 0; i < model.num_variables(); ++i) {
    const Variable& v = model.variables()[i];
    const double x = detail::ValueAt(point, VarId{i}, "bounds");
    consider(std::max({0.0, v.lower - x, x - v.upper}), "bounds[" + v.name + "]");
  }
  for (const auto& c : model.constraints()) {
    if (!c.active) continue;
    consider(Residual(c, point), c.name);
  }
  report.feasible = report.worst_residual <= tol;
  return report;
}

namespace detail {

inline std::string FormatNumber(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void DumpTerms(std::ostringstream& os, const Model& model, const LinearExpr& linear,
                      std::span<const BilinearTerm> bilinear) {
  bool first = true;
  auto sep = [&](double coef) {
    if (!first) os << (coef < 0 ? " - " : " + ");
    else if (coef < 0) os << "-";
    first = false;
  };
  for (const auto& [var, coef] : linear.terms()) {
    sep(coef);
    os << FormatNumber(std::abs(coef)) << " " << model.variable(var).name;
  }
  for (const auto& b : bilinear) {
    sep(b.coefficient);
    os << FormatNumber(std::abs(b.coefficient)) << " " << model.variable(b.var_a).name
       << "*" << model.variable(b.var_b).name;
  }
  if (linear.constant() != 0.0 || first) {
    sep(linear.constant());
    os << FormatNumber(std::abs(linear.constant()));
  }
}

}  // namespace detail

// Text dump: variables, objective, then one constraint per line
// ("name: expr sense rhs"). Golden-file format, not a solver exchange format.
inline std::string dump(const Model& model) {
  std::ostringstream os;
  for (const auto& v : model.variables()) {
    os << "var " << v.name << " [" << detail::FormatNumber(v.lower) << ", "
       << detail::FormatNumber(v.upper) << "]"
       << (v.domain == Domain::kBinary ? " binary" : "") << "\n";
  }
  os << "minimize: ";
  detail::DumpTerms(os, model, model.objective(), model.objective_bilinear());
  os << "\n";
  for (const auto& c : model.constraints()) {
    os << c.name << ": ";
    detail::DumpTerms(os, model, c.linear, c.bilinear);
    os << " " << ToString(c.sense) << " " << detail::FormatNumber(c.rhs);
    if (!c.active) os << " (inactive)";
    os << "\n";
  }
  return os.str();
}

}  // namespace pooling
