// Copyright 2026 The otlp authors
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

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "otlp/config.hpp"
#include "otlp/csv.hpp"
#include "otlp/error.hpp"
#include "otlp/log.hpp"
#include "otlp/metrics.hpp"
#include "otlp/model.hpp"
#include "otlp/report.hpp"
#include "otlp/sensitivity.hpp"
#include "otlp/solver.hpp"
#include "otlp/types.hpp"

namespace {

// Exit codes: 0 success, 1 input/config error, 2 infeasible,
// 3 verification mismatch.
constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitMismatch = 3;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw otlp::ValidationError("cannot open output file '" + path + "'");
  }
  out << text;
}

std::vector<otlp::MetricKind> parse_metric_list(const std::string& csv) {
  std::vector<std::string> tokens;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) tokens.push_back(token);
  std::vector<otlp::MetricKind> kinds;
  for (std::size_t i = 0; i < tokens.size();) {
    std::string name = tokens[i++];
    // total_cost:<w1,w2,w3,w4> spans four comma-separated tokens.
    if (name.rfind("total_cost:", 0) == 0) {
      for (int k = 0; k < 3; ++k) {
        if (i >= tokens.size()) {
          throw otlp::ValidationError(
              "total_cost needs four comma-separated weights");
        }
        name += "," + tokens[i++];
      }
    }
    kinds.push_back(otlp::MetricKind::parse(name));
  }
  return kinds;
}

otlp::SensitivityMap load_tables(const std::string& input_path,
                                 const otlp::GridSpec& grid) {
  const otlp::InputKind kind = otlp::detect_input_kind_file(input_path);
  if (kind == otlp::InputKind::kSheet) {
    return otlp::read_sensitivity_file(input_path);
  }
  const otlp::InstanceData data = otlp::read_instances_file(input_path);
  if (data.instances.empty()) {
    throw otlp::ValidationError("no instances in '" + input_path + "'");
  }
  return otlp::build_sensitivity(data.instances,
                                 otlp::build_grid(grid, data.instances));
}

struct CommonArgs {
  std::string input;
  std::string config;
  std::string output;
  std::string grid_step;
  std::string grid_mode;
  std::int64_t node_limit = otlp::SolveOptions().node_limit;
  std::int64_t tuple_limit = 10'000'000;
  std::int64_t seed = 0;  // reserved for test fixture generation
};

void apply_grid_flags(const CommonArgs& args, otlp::GridSpec& grid) {
  if (!args.grid_step.empty()) {
    grid.mode = otlp::GridMode::kUniform;
    grid.step = otlp::parse_decimal(args.grid_step);
  }
  if (!args.grid_mode.empty()) {
    if (args.grid_mode == "uniform") {
      grid.mode = otlp::GridMode::kUniform;
    } else if (args.grid_mode == "unique-scores") {
      grid.mode = otlp::GridMode::kUniqueScores;
    } else {
      throw otlp::ValidationError(
          "grid mode must be 'uniform' or 'unique-scores'");
    }
  }
}

int cmd_sensitivity(const CommonArgs& args, const std::string& metrics_csv) {
  const otlp::InstanceData data = otlp::read_instances_file(args.input);
  if (data.instances.empty()) {
    throw otlp::ValidationError("no instances in '" + args.input + "'");
  }
  otlp::GridSpec grid;
  apply_grid_flags(args, grid);
  const std::vector<otlp::MetricKind> kinds =
      metrics_csv.empty() ? std::vector<otlp::MetricKind>()
                          : parse_metric_list(metrics_csv);
  const otlp::SensitivityMap tables = otlp::build_sensitivity(
      data.instances, otlp::build_grid(grid, data.instances));
  std::ostringstream out;
  otlp::write_sensitivity_csv(out, tables, kinds);
  write_text(args.output, out.str());
  return kExitOk;
}

int cmd_optimize(const CommonArgs& args) {
  otlp::RunConfig config = otlp::load_config(args.config);
  apply_grid_flags(args, config.grid);
  otlp::SolveOptions options;
  options.node_limit = args.node_limit;
  try {
    const otlp::SensitivityMap tables = load_tables(args.input, config.grid);
    const otlp::SelectionProblem problem =
        otlp::build_problem(tables, config.objective, config.constraints);
    const otlp::Solution sol = otlp::solve(problem, options);
    write_text(args.output,
               otlp::serialize_report(build_run_report(config, problem, sol)));
    return kExitOk;
  } catch (const otlp::InfeasibleError& e) {
    write_text(args.output,
               otlp::serialize_report(build_infeasible_report(config, e)));
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  }
}

nlohmann::ordered_json solution_summary(const otlp::Solution& sol) {
  nlohmann::ordered_json j;
  j["objective_value"] = sol.objective_value;
  if (sol.objective_exact) {
    j["objective_exact"] = otlp::rat_string(*sol.objective_exact);
  } else {
    j["objective_exact"] = nullptr;
  }
  nlohmann::ordered_json tuple = nlohmann::ordered_json::array();
  for (const auto& chosen : sol.chosen) {
    tuple.push_back({{"subspace", chosen.subspace},
                     {"threshold", chosen.row.threshold}});
  }
  j["tuple"] = std::move(tuple);
  j["method"] = sol.stats.method;
  j["certificate"] =
      std::string(otlp::certificate_string(sol.certificate));
  return j;
}

int cmd_verify(const CommonArgs& args) {
  otlp::RunConfig config = otlp::load_config(args.config);
  apply_grid_flags(args, config.grid);
  otlp::SolveOptions options;
  options.node_limit = args.node_limit;

  const otlp::SensitivityMap tables = load_tables(args.input, config.grid);
  const otlp::SelectionProblem problem =
      otlp::build_problem(tables, config.objective, config.constraints);

  std::optional<otlp::Solution> via_solve, via_oracle;
  bool solve_infeasible = false, oracle_infeasible = false;
  try {
    via_solve = otlp::solve(problem, options);
  } catch (const otlp::InfeasibleError&) {
    solve_infeasible = true;
  }
  try {
    via_oracle = otlp::solve_bruteforce(problem, args.tuple_limit);
  } catch (const otlp::InfeasibleError&) {
    oracle_infeasible = true;
  }

  // Negative-control hook: displace the solve() tuple so the comparison must
  // fail. Read only here; set only by the test suite.
  if (via_solve && std::getenv("OTLP_TEST_PERTURB_VERIFY") != nullptr) {
    for (std::size_t g = 0; g < problem.groups.size(); ++g) {
      if (problem.groups[g].candidates.size() > 1) {
        const std::size_t alt = via_solve->chosen[g].candidate_index == 0
                                    ? 1
                                    : via_solve->chosen[g].candidate_index - 1;
        via_solve->chosen[g].candidate_index = alt;
        via_solve->chosen[g].row = problem.groups[g].candidates[alt].row;
        break;
      }
    }
  }

  bool match;
  if (solve_infeasible || oracle_infeasible) {
    match = solve_infeasible == oracle_infeasible;
  } else {
    match = true;
    for (std::size_t g = 0; g < via_solve->chosen.size(); ++g) {
      match = match && via_solve->chosen[g].candidate_index ==
                           via_oracle->chosen[g].candidate_index;
    }
    if (via_solve->objective_exact && via_oracle->objective_exact) {
      match = match &&
              *via_solve->objective_exact == *via_oracle->objective_exact;
    } else {
      match = match && std::fabs(via_solve->objective_value -
                                 via_oracle->objective_value) <= 1e-9;
    }
  }

  nlohmann::ordered_json report;
  report["match"] = match;
  report["both_infeasible"] = solve_infeasible && oracle_infeasible;
  report["solve"] =
      via_solve ? solution_summary(*via_solve)
                : nlohmann::ordered_json(nullptr);
  report["bruteforce"] =
      via_oracle ? solution_summary(*via_oracle)
                 : nlohmann::ordered_json(nullptr);
  if (via_oracle) {
    report["tuples_enumerated"] = via_oracle->stats.nodes;
  }
  write_text(args.output, otlp::serialize_report(report));
  if (!match) {
    std::cerr << "verification mismatch\n";
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_curves(const CommonArgs& args) {
  otlp::RunConfig config = otlp::load_config(args.config);
  apply_grid_flags(args, config.grid);
  const otlp::SensitivityMap tables = load_tables(args.input, config.grid);
  if (tables.size() != 1) {
    throw otlp::ValidationError(
        "curves requires a single-subspace input, got " +
        std::to_string(tables.size()) + " subspaces");
  }
  const otlp::SensitivityTable& table = tables.begin()->second;
  if (config.objective.metric.needs_cost() && !table.has_cost) {
    throw otlp::MissingCostError(
        "metric '" + config.objective.metric.name() +
        "' requires cost data, but none was ingested");
  }
  std::ostringstream out;
  out << "threshold,objective_value,feasible\n";
  for (const auto& row : table.rows) {
    bool feasible = true;
    for (const auto& spec : config.constraints) {
      // With a single subspace a global constraint degenerates to a row-wise
      // condition, so the feasible flag honors both scopes.
      if (spec.scope == otlp::Scope::kLocal &&
          !spec.applies_to(table.subspace)) {
        continue;
      }
      feasible = feasible && otlp::row_satisfies(row, spec.metric, spec.op,
                                                 spec.bound, table.has_cost);
    }
    out << otlp::format_double(row.threshold) << ','
        << otlp::format_double(otlp::evaluate(row, config.objective.metric))
        << ',' << (feasible ? "true" : "false") << '\n';
  }
  write_text(args.output, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "otlp: decision-threshold selection via exact integer programming over "
      "per-subspace sensitivity tables"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string metrics_csv;

  const auto add_common = [&](CLI::App* cmd, bool needs_config) {
    cmd->add_option("--input", args.input, "Input CSV path")->required();
    if (needs_config) {
      cmd->add_option("--config", args.config, "JSON config path")->required();
    }
    cmd->add_option("--output", args.output,
                    "Output path (stdout when omitted)");
    cmd->add_option("--grid-step", args.grid_step,
                    "Uniform grid step as a decimal (overrides config)");
    cmd->add_option("--grid-mode", args.grid_mode,
                    "Grid mode: uniform or unique-scores");
    cmd->add_option("--node-limit", args.node_limit,
                    "Branch-and-bound node limit");
    cmd->add_option("--tuple-limit", args.tuple_limit,
                    "Brute-force tuple enumeration limit");
    cmd->add_option("--seed", args.seed,
                    "Reserved for test fixture generation");
  };

  CLI::App* sensitivity = app.add_subcommand(
      "sensitivity", "Build the per-subspace sensitivity sheet from scores");
  add_common(sensitivity, /*needs_config=*/false);
  sensitivity->add_option("--metrics", metrics_csv,
                          "Comma-separated derived metric columns");

  CLI::App* optimize = app.add_subcommand(
      "optimize", "Select optimal thresholds for a config's objective");
  add_common(optimize, /*needs_config=*/true);

  CLI::App* verify = app.add_subcommand(
      "verify", "Cross-check solve() against brute-force enumeration");
  add_common(verify, /*needs_config=*/true);

  CLI::App* curves = app.add_subcommand(
      "curves", "Emit per-threshold objective/feasibility curve data");
  add_common(curves, /*needs_config=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (app.got_subcommand(sensitivity)) {
      return cmd_sensitivity(args, metrics_csv);
    }
    if (app.got_subcommand(optimize)) {
      return cmd_optimize(args);
    }
    if (app.got_subcommand(verify)) {
      return cmd_verify(args);
    }
    if (app.got_subcommand(curves)) {
      return cmd_curves(args);
    }
  } catch (const otlp::InfeasibleError& e) {
    // Infeasibility outside optimize (which reports it itself).
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const otlp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
