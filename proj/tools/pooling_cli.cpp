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

// Command-line front end: instance generation, single solves, the restriction
// heuristic, the root cut loop and batch benchmarks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pooling/bench/batch.hpp"
#include "pooling/bench/generator.hpp"
#include "pooling/bench/stats.hpp"
#include "pooling/pooling.hpp"

namespace {

using namespace pooling;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + path + "'");
  out << text;
}

PQModel LoadModel(const std::string& path) {
  Network net = from_json(ReadFile(path));
  net.freeze();
  return build_pq(net);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string Fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pooling problem global optimization toolkit"};
  app.require_subcommand(1);

  bench::GenSpec gen;
  std::string family = "sparse_haverly";
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a seeded random instance as JSON");
  generate->add_option("--family", family, "sparse_haverly or dense_rand");
  generate->add_option("--ni", gen.ni, "number of inputs")->required();
  generate->add_option("--nl", gen.nl, "number of pools")->required();
  generate->add_option("--nj", gen.nj, "number of outputs")->required();
  generate->add_option("--nk", gen.nk, "number of qualities");
  generate->add_option("--na", gen.na, "number of edges")->required();
  generate->add_option("--seed", gen.seed, "random seed");
  generate->add_option("--out", gen_out, "output file (stdout if omitted)");

  std::string instance;
  std::string config = "cuts+heuristic";
  GapSpec gap;
  std::string json_report;
  auto* solve = app.add_subcommand("solve", "Solve one instance to global optimality");
  solve->add_option("--instance", instance, "instance JSON")->required();
  solve->add_option("--config", config, "default, cuts, heuristic or cuts+heuristic");
  solve->add_option("--rel-gap", gap.rel_tol, "relative gap tolerance");
  solve->add_option("--abs-gap", gap.abs_tol, "absolute gap tolerance");
  solve->add_option("--time-limit", gap.time_limit, "time limit in seconds");
  solve->add_option("--json-report", json_report, "write the report as JSON to this file");

  std::size_t tau = 1;
  auto* heuristic = app.add_subcommand("heuristic", "Run the MIP restriction heuristic");
  heuristic->add_option("--instance", instance, "instance JSON")->required();
  heuristic->add_option("--tau", tau, "copies per pool");

  std::size_t max_rounds = 20;
  auto* cutloop = app.add_subcommand("cutloop", "Run the root cut loop and print bounds");
  cutloop->add_option("--instance", instance, "instance JSON")->required();
  cutloop->add_option("--max-rounds", max_rounds, "maximum cut rounds");

  std::string instances_dir;
  std::string configs = "default,cuts,heuristic,cuts+heuristic";
  std::string out_csv;
  std::string profile_out;
  bool oracle_mode = false;
  GapSpec bench_gap = bench::BatchGapSpec();
  auto* benchcmd = app.add_subcommand("bench", "Run every config on every instance of a directory");
  benchcmd->add_option("--instances-dir", instances_dir, "directory of instance JSON files")->required();
  benchcmd->add_option("--configs", configs, "comma-separated config names");
  benchcmd->add_option("--out-csv", out_csv, "record table CSV (stdout if omitted)");
  benchcmd->add_option("--profile-out", profile_out, "performance profile prefix (.csv and .dat)");
  benchcmd->add_flag("--oracle-mode", oracle_mode, "exclude heuristic and cut time");
  benchcmd->add_option("--rel-gap", bench_gap.rel_tol, "relative gap tolerance");
  benchcmd->add_option("--time-limit", bench_gap.time_limit, "time limit per run in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*generate) {
      gen.family = bench::ParseFamily(family);
      const std::string text = to_json(bench::generate_instance(gen));
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        WriteFile(gen_out, text);
      }
      return 0;
    }

    if (*solve) {
      const PQModel pq = LoadModel(instance);
      const SolveReport r = branch_and_cut(pq, gap, bench::ConfigOptions(config));
      std::cout << "status " << ToString(r.status) << "\n"
                << "lower " << Fmt(r.lower) << "\n"
                << "upper " << Fmt(r.upper) << "\n"
                << "rel_gap " << Fmt(r.rel_gap) << "\n"
                << "nodes " << r.nodes << "\n"
                << "cuts " << r.cuts << "\n"
                << "wall_seconds " << Fmt(r.wall_seconds) << "\n";
      if (!r.message.empty()) std::cout << "message " << r.message << "\n";
      if (!json_report.empty()) WriteFile(json_report, report_json(r).dump(2) + "\n");
      return r.status == SolveStatus::kError ? 2 : 0;
    }

    if (*heuristic) {
      const PQModel pq = LoadModel(instance);
      PrimalSearchOptions ps;
      ps.tau = tau;
      const auto sol = initial_primal_search(pq, ps);
      if (!sol) {
        std::cout << "no solution found\n";
        return 2;
      }
      std::cout << "objective " << Fmt(sol->objective) << "\n";
      for (std::size_t v = 0; v < pq.model.num_variables(); ++v) {
        const double x = sol->values[v];
        if (std::abs(x) > 1e-9) std::cout << pq.model.variables()[v].name << " " << Fmt(x) << "\n";
      }
      return 0;
    }

    if (*cutloop) {
      const PQModel pq = LoadModel(instance);
      RelaxedModel rm = relax(pq.model);
      CutBlock cb = add_all_pooling_inequalities(rm, pq);
      for (std::size_t it = 0;; ++it) {
        const LPResult lp = solve_lp(rm.lp);
        if (lp.status != LPStatus::kOptimal) {
          std::cout << "Iter " << it << ": LP " << ToString(lp.status) << "\n";
          return 2;
        }
        std::cout << "Iter " << it << ": " << Fmt(lp.objective) << "\n";
        if (it >= max_rounds) break;
        const std::size_t added = add_valid_cuts(cb, rm, lp.values);
        std::cout << "  Adding " << added << " cuts\n";
        if (added == 0) break;
      }
      return 0;
    }

    if (*benchcmd) {
      const auto names = SplitList(configs);
      for (const auto& c : names) bench::ConfigOptions(c);
      const auto instances = bench::load_instances(instances_dir);
      const auto records = bench::run_batch(instances, names, bench_gap, oracle_mode);
      const std::string csv = bench::records_to_csv(records);
      if (out_csv.empty()) {
        std::cout << csv;
      } else {
        WriteFile(out_csv, csv);
        std::filesystem::path json_path(out_csv);
        json_path.replace_extension(".json");
        WriteFile(json_path.string(), bench::records_to_json(records));
      }
      if (!profile_out.empty()) {
        const auto prof = bench::performance_profile(bench::profile_times(records));
        WriteFile(profile_out + ".csv", prof.to_csv());
        WriteFile(profile_out + ".dat", prof.to_step_data());
      }
      for (const auto& r : records) {
        if (r.status == "error") return 2;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kParseError ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
