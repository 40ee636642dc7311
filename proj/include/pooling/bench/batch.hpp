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
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pooling/error.hpp"
#include "pooling/network.hpp"
#include "pooling/network_json.hpp"
#include "pooling/pq_formulation.hpp"
#include "pooling/solve/branch_and_cut.hpp"
#include "pooling/solve/gap.hpp"

namespace pooling::bench {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct RunRecord {
  std::string instance;
  std::string config;
  std::string status;
  double time = kInfinity;
  double lower = -kInfinity;
  double upper = kInfinity;
  double gap = kInfinity;  // relative gap in percent

  bool solved() const { return status == "optimal"; }
  bool operator==(const RunRecord&) const = default;
};

// Solver options for a named configuration.
inline BranchAndCutOptions ConfigOptions(const std::string& config) {
  BranchAndCutOptions o;
  if (config == "default") {
    o.use_pooling_cuts = false;
    o.use_primal_heuristic = false;
  } else if (config == "cuts") {
    o.use_pooling_cuts = true;
    o.use_primal_heuristic = false;
  } else if (config == "heuristic") {
    o.use_pooling_cuts = false;
    o.use_primal_heuristic = true;
  } else if (config == "cuts+heuristic") {
    o.use_pooling_cuts = true;
    o.use_primal_heuristic = true;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown config '" + config + "'");
  }
  return o;
}

inline const std::vector<std::string>& AllConfigs() {
  static const std::vector<std::string> kConfigs{"default", "cuts", "heuristic", "cuts+heuristic"};
  return kConfigs;
}

// Desk-scale default for batches.
inline GapSpec BatchGapSpec() { return GapSpec{1e-4, 1e-8, 120.0}; }

struct BatchInstance {
  std::string name;
  std::optional<Network> network;  // empty when loading failed
  std::string load_error;
};

// Loads every *.json file of a directory, in name order.
inline std::vector<BatchInstance> load_instances(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<BatchInstance> out;
  for (const auto& f : files) {
    BatchInstance bi{f.stem().string(), std::nullopt, ""};
    try {
      std::ifstream in(f);
      std::stringstream ss;
      ss << in.rdbuf();
      Network net = from_json(ss.str());
      net.freeze();
      bi.network = std::move(net);
    } catch (const std::exception& e) {
      bi.load_error = e.what();
    }
    out.push_back(std::move(bi));
  }
  return out;
}

inline RunRecord MakeRecord(std::string instance, std::string config, std::string status,
                            double time, double lower, double upper) {
  return RunRecord{std::move(instance), std::move(config), std::move(status), time,
                   lower,              upper,             relative_gap(lower, upper) * 100.0};
}

// One record per (instance, config), in that order. Failures are recorded in
// the status column. In oracle mode the time spent in the primal heuristic
// and in cut generation is not counted.
inline std::vector<RunRecord> run_batch(const std::vector<BatchInstance>& instances,
                                        const std::vector<std::string>& configs,
                                        const GapSpec& gap, bool oracle_mode = false) {
  std::vector<RunRecord> records;
  for (const auto& inst : instances) {
    for (const auto& config : configs) {
      if (!inst.network) {
        records.push_back(MakeRecord(inst.name, config, "error", kInfinity, -kInfinity, kInfinity));
        continue;
      }
      try {
        const PQModel pq = build_pq(*inst.network);
        const SolveReport r = branch_and_cut(pq, gap, ConfigOptions(config));
        double time = r.wall_seconds;
        if (oracle_mode) time = std::max(0.0, time - r.heuristic_seconds - r.cut_seconds);
        records.push_back(MakeRecord(inst.name, config, ToString(r.status), time, r.lower, r.upper));
      } catch (const std::exception&) {
        records.push_back(MakeRecord(inst.name, config, "error", kInfinity, -kInfinity, kInfinity));
      }
    }
  }
  return records;
}

namespace detail {

inline std::string FormatCell(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double ParseCell(const std::string& s) {
  if (s == "inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw Error(ErrorCode::kParseError, "bad number '" + s + "' in record table");
  }
  return v;
}

}  // namespace detail

inline constexpr const char* kRecordHeader = "instance,config,status,time,lower,upper,gap";

inline std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::string out = std::string(kRecordHeader) + "\n";
  for (const auto& r : records) {
    out += r.instance + "," + r.config + "," + r.status + "," + detail::FormatCell(r.time) + "," +
           detail::FormatCell(r.lower) + "," + detail::FormatCell(r.upper) + "," +
           detail::FormatCell(r.gap) + "\n";
  }
  return out;
}

inline std::vector<RunRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) {
    throw Error(ErrorCode::kParseError, "record table must start with '" + std::string(kRecordHeader) + "'");
  }
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw Error(ErrorCode::kParseError, "expected 7 columns: " + line);
    out.push_back(RunRecord{cells[0], cells[1], cells[2], detail::ParseCell(cells[3]),
                            detail::ParseCell(cells[4]), detail::ParseCell(cells[5]),
                            detail::ParseCell(cells[6])});
  }
  return out;
}

// Non-finite numbers are written as null: lower can only be -inf, every
// other numeric column only +inf.
inline std::string records_to_json(const std::vector<RunRecord>& records) {
  auto num = [](double x) -> nlohmann::ordered_json {
    return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    arr.push_back({{"instance", r.instance}, {"config", r.config}, {"status", r.status},
                   {"time", num(r.time)},    {"lower", num(r.lower)}, {"upper", num(r.upper)},
                   {"gap", num(r.gap)}});
  }
  return arr.dump(2) + "\n";
}

inline std::vector<RunRecord> records_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  auto num = [](const nlohmann::json& v, double missing) {
    return v.is_null() ? missing : v.get<double>();
  };
  std::vector<RunRecord> out;
  for (const auto& r : doc) {
    out.push_back(RunRecord{r.at("instance").get<std::string>(), r.at("config").get<std::string>(),
                            r.at("status").get<std::string>(), num(r.at("time"), kInfinity),
                            num(r.at("lower"), -kInfinity), num(r.at("upper"), kInfinity),
                            num(r.at("gap"), kInfinity)});
  }
  return out;
}

// Solve times by config for performance profiles; unsolved runs get +inf.
inline std::map<std::string, std::map<std::string, double>> profile_times(
    const std::vector<RunRecord>& records) {
  std::map<std::string, std::map<std::string, double>> times;
  for (const auto& r : records) times[r.config][r.instance] = r.solved() ? r.time : kInfinity;
  return times;
}

}  // namespace pooling::bench
