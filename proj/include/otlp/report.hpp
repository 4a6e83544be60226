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

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "otlp/config.hpp"
#include "otlp/error.hpp"
#include "otlp/metrics.hpp"
#include "otlp/model.hpp"
#include "otlp/rational.hpp"

namespace otlp {

namespace report_detail {

/// Metrics shown per subspace: precision/recall/f1, then the objective and
/// constraint metrics, then config extras, deduplicated by name.
inline std::vector<MetricKind> report_metrics(const RunConfig& config,
                                              bool has_cost) {
  std::vector<MetricKind> kinds;
  std::vector<std::string> seen;
  const auto add = [&](const MetricKind& kind) {
    if (kind.needs_cost() && !has_cost) return;
    const std::string name = kind.name();
    for (const auto& s : seen) {
      if (s == name) return;
    }
    seen.push_back(name);
    kinds.push_back(kind);
  };
  add(MetricKind::parse("precision"));
  add(MetricKind::parse("recall"));
  add(MetricKind::parse("f1"));
  add(config.objective.metric);
  for (const auto& spec : config.constraints) add(spec.metric);
  for (const auto& kind : config.report_metrics) {
    if (kind.needs_cost() && !has_cost) {
      throw MissingCostError("report metric '" + kind.name() +
                             "' requires cost data, but none was ingested");
    }
    add(kind);
  }
  return kinds;
}

}  // namespace report_detail

/// The run report: config echo, per-subspace selection and metrics, the
/// constraint audit, and deterministic solver statistics. Key order is fixed
/// and doubles use shortest round-trip rendering, so identical runs serialize
/// byte-identically.
inline nlohmann::ordered_json build_run_report(const RunConfig& config,
                                               const SelectionProblem& problem,
                                               const Solution& sol) {
  nlohmann::ordered_json j;
  j["status"] = "optimal";
  j["config"] = config_echo(config);
  {
    nlohmann::ordered_json obj;
    obj["metric"] = config.objective.metric.name();
    obj["direction"] = config.objective.direction == Direction::kMinimize
                           ? "minimize"
                           : "maximize";
    obj["value"] = sol.objective_value;
    if (sol.objective_exact) {
      obj["value_exact"] = rat_string(*sol.objective_exact);
    } else {
      obj["value_exact"] = nullptr;
    }
    j["objective"] = std::move(obj);
  }
  {
    const std::vector<MetricKind> kinds =
        report_detail::report_metrics(config, problem.has_cost);
    nlohmann::ordered_json subspaces = nlohmann::ordered_json::array();
    for (const auto& chosen : sol.chosen) {
      nlohmann::ordered_json s;
      s["subspace"] = chosen.subspace;
      s["threshold"] = chosen.row.threshold;
      s["tp"] = chosen.row.tp;
      s["fp"] = chosen.row.fp;
      s["tn"] = chosen.row.tn;
      s["fn"] = chosen.row.fn;
      s["objective_value"] = evaluate(chosen.row, config.objective.metric);
      nlohmann::ordered_json metrics;
      for (const auto& kind : kinds) {
        metrics[kind.name()] = evaluate(chosen.row, kind);
      }
      s["metrics"] = std::move(metrics);
      subspaces.push_back(std::move(s));
    }
    j["subspaces"] = std::move(subspaces);
  }
  {
    nlohmann::ordered_json audits = nlohmann::ordered_json::array();
    for (const auto& audit : audit_constraints(problem, sol.chosen)) {
      nlohmann::ordered_json a;
      a["scope"] = audit.spec.scope == Scope::kLocal ? "local" : "global";
      if (audit.spec.subspace) {
        a["subspace"] = *audit.spec.subspace;
      } else {
        a["subspace"] = nullptr;
      }
      a["metric"] = audit.spec.metric.name();
      a["op"] = std::string(op_string(audit.spec.op));
      a["bound"] = rat_string(audit.spec.bound);
      a["achieved"] = audit.achieved;
      a["slack"] = audit.slack;
      a["defined"] = audit.defined;
      a["satisfied"] = audit.satisfied;
      if (!audit.per_subspace.empty()) {
        nlohmann::ordered_json per;
        for (const auto& [key, value] : audit.per_subspace) {
          per[key] = value;
        }
        a["per_subspace"] = std::move(per);
      }
      audits.push_back(std::move(a));
    }
    j["constraints"] = std::move(audits);
  }
  {
    nlohmann::ordered_json solver;
    solver["certificate"] = std::string(certificate_string(sol.certificate));
    solver["method"] = sol.stats.method;
    solver["nodes"] = sol.stats.nodes;
    solver["lp_iterations"] = sol.stats.lp_iterations;
    j["solver"] = std::move(solver);
  }
  return j;
}

inline nlohmann::ordered_json build_infeasible_report(
    const RunConfig& config, const InfeasibleError& err) {
  nlohmann::ordered_json j;
  j["status"] = "infeasible";
  j["config"] = config_echo(config);
  {
    nlohmann::ordered_json inf;
    inf["cause"] = err.cause() == InfeasibleCause::kLocalFilter ? "local"
                                                                : "coupling";
    inf["subspace"] =
        err.subspace().empty()
            ? nlohmann::ordered_json(nullptr)
            : nlohmann::ordered_json(err.subspace());
    inf["constraint"] = err.constraint();
    inf["message"] = err.what();
    j["infeasible"] = std::move(inf);
  }
  {
    nlohmann::ordered_json obj;
    obj["metric"] = config.objective.metric.name();
    obj["direction"] = config.objective.direction == Direction::kMinimize
                           ? "minimize"
                           : "maximize";
    obj["value"] = nullptr;
    obj["value_exact"] = nullptr;
    j["objective"] = std::move(obj);
  }
  j["subspaces"] = nlohmann::ordered_json::array();
  j["constraints"] = nlohmann::ordered_json::array();
  j["solver"] = nullptr;
  return j;
}

inline std::string serialize_report(const nlohmann::ordered_json& report) {
  return report.dump(2) + "\n";
}

}  // namespace otlp
