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
#include <cstddef>
#include <limits>

#include "pooling/error.hpp"

namespace pooling {

inline constexpr double kGapEpsilon = 1e-10;

// Relative difference of two bounds: infinite if either is, scaled by the
// larger magnitude when both are nonzero, by kGapEpsilon otherwise.
inline double relative_gap(double a, double b) {
  if (std::isinf(a) || std::isinf(b) || std::isnan(a) || std::isnan(b)) {
    return std::numeric_limits<double>::infinity();
  }
  const double diff = std::abs(a - b);
  if (a != 0.0 && b != 0.0) return diff / std::max(std::abs(a), std::abs(b));
  return diff / kGapEpsilon;
}

struct GapSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  std::size_t node_limit = std::numeric_limits<std::size_t>::max();

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "gap tolerances must be positive");
    }
    if (!(time_limit > 0.0)) throw Error(ErrorCode::kInvalidArgument, "time limit must be positive");
  }

  // True when [lower, upper] is closed under either tolerance.
  bool closed(double lower, double upper) const {
    if (!std::isfinite(upper) || !std::isfinite(lower)) return false;
    return upper - lower <= abs_tol || relative_gap(lower, upper) <= rel_tol;
  }
};

}  // namespace pooling
