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
#include <limits>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pooling/error.hpp"

namespace pooling::bench {

// (prod (v_i + shift))^(1/n) - shift, computed in log space.
inline double shifted_geomean(std::span<const double> values, double shift = 0.1) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "shifted_geomean of an empty list");
  double log_sum = 0.0;
  for (double v : values) {
    const double shifted = v + shift;
    if (!(shifted > 0.0)) {
      throw Error(ErrorCode::kNonPositiveShifted,
                  "value " + std::to_string(v) + " plus shift is not positive");
    }
    log_sum += std::log(shifted);
  }
  if (values.size() == 1) return values[0];
  return std::exp(log_sum / static_cast<double>(values.size())) - shift;
}

struct ProfilePoint {
  double tau = 1.0;
  std::map<std::string, double> rho;  // per config
};

struct PerformanceProfile {
  std::vector<std::string> configs;
  std::vector<std::string> instances;
  std::map<std::string, std::map<std::string, double>> ratio;  // config -> instance -> r
  std::vector<ProfilePoint> points;                             // one per breakpoint

  // Fraction of instances with ratio <= tau for `config`.
  double rho(const std::string& config, double tau) const {
    const auto& r = ratio.at(config);
    std::size_t count = 0;
    for (const auto& [inst, value] : r) count += value <= tau ? 1 : 0;
    return instances.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(instances.size());
  }

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "tau";
    for (const auto& c : configs) os << "," << c;
    os << "\n";
    for (const auto& p : points) {
      os << p.tau;
      for (const auto& c : configs) os << "," << p.rho.at(c);
      os << "\n";
    }
    return os.str();
  }

  // Step data for gnuplot: one block per config, two lines per breakpoint.
  std::string to_step_data() const {
    std::ostringstream os;
    os.precision(17);
    for (const auto& c : configs) {
      os << "# " << c << "\n";
      double prev = 0.0;
      for (const auto& p : points) {
        os << p.tau << " " << prev << "\n" << p.tau << " " << p.rho.at(c) << "\n";
        prev = p.rho.at(c);
      }
      os << "\n\n";
    }
    return os.str();
  }
};

// times[config][instance] = solve time, +inf when unsolved. Every config must
// cover every instance.
inline PerformanceProfile performance_profile(
    const std::map<std::string, std::map<std::string, double>>& times) {
  PerformanceProfile prof;
  std::set<std::string> instances;
  for (const auto& [config, row] : times) {
    prof.configs.push_back(config);
    for (const auto& [inst, t] : row) instances.insert(inst);
  }
  prof.instances.assign(instances.begin(), instances.end());
  for (const auto& [config, row] : times) {
    for (const auto& inst : prof.instances) {
      if (row.count(inst) == 0) {
        throw Error(ErrorCode::kMissingRecord, "no record for (" + inst + ", " + config + ")");
      }
    }
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::set<double> breakpoints;
  for (const auto& inst : prof.instances) {
    double best = inf;
    for (const auto& [config, row] : times) best = std::min(best, row.at(inst));
    for (const auto& [config, row] : times) {
      const double t = row.at(inst);
      double r = inf;
      if (std::isfinite(t)) r = best > 0.0 ? t / best : (t == 0.0 ? 1.0 : inf);
      prof.ratio[config][inst] = r;
      if (std::isfinite(r)) breakpoints.insert(r);
    }
  }
  if (breakpoints.empty() || *breakpoints.begin() > 1.0) breakpoints.insert(1.0);
  for (double tau : breakpoints) {
    ProfilePoint p{tau, {}};
    for (const auto& c : prof.configs) p.rho[c] = prof.rho(c, tau);
    prof.points.push_back(std::move(p));
  }
  return prof;
}

}  // namespace pooling::bench
