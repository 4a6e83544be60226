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

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "otlp/error.hpp"
#include "otlp/metrics.hpp"
#include "otlp/model.hpp"
#include "otlp/rational.hpp"
#include "otlp/types.hpp"

namespace otlp {

struct RunConfig {
  ObjectiveSpec objective;
  std::vector<ConstraintSpec> constraints;
  GridSpec grid;
  std::vector<MetricKind> report_metrics;  // extra metrics in run reports
};

namespace config_detail {

/// Bounds and steps are parsed to exact rationals. Decimal strings are the
/// canonical form; JSON floats go through their shortest round-trip decimal
/// rendering, so 0.98 means 49/50, not the nearest binary double.
inline Rat json_to_rat(const nlohmann::json& v, const std::string& what) {
  if (v.is_string()) {
    return parse_decimal(v.get<std::string>());
  }
  if (v.is_number_integer()) {
    return Rat(v.get<std::int64_t>());
  }
  if (v.is_number_unsigned()) {
    return Rat(BigInt(v.get<std::uint64_t>()));
  }
  if (v.is_number_float()) {
    return parse_decimal(v.dump());
  }
  throw ValidationError(what + " must be a decimal string or number");
}

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<const char*> known,
                                const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ValidationError("unknown key '" + key + "' in " + context);
    }
  }
}

}  // namespace config_detail

inline RunConfig parse_config(const nlohmann::json& j) {
  namespace cd = config_detail;
  if (!j.is_object()) {
    throw ValidationError("config must be a JSON object");
  }
  cd::reject_unknown_keys(
      j, {"objective", "constraints", "grid", "report_metrics"}, "config");
  if (!j.contains("objective")) {
    throw ValidationError("config requires an 'objective' object");
  }
  RunConfig config;
  {
    const auto& obj = j.at("objective");
    cd::reject_unknown_keys(obj, {"metric", "direction"}, "objective");
    if (!obj.contains("metric") || !obj.contains("direction")) {
      throw ValidationError("objective requires 'metric' and 'direction'");
    }
    config.objective.metric =
        MetricKind::parse(obj.at("metric").get<std::string>());
    const std::string dir = obj.at("direction").get<std::string>();
    if (dir == "minimize") {
      config.objective.direction = Direction::kMinimize;
    } else if (dir == "maximize") {
      config.objective.direction = Direction::kMaximize;
    } else {
      throw ValidationError("direction must be 'minimize' or 'maximize'");
    }
  }
  if (j.contains("constraints")) {
    if (!j.at("constraints").is_array()) {
      throw ValidationError("'constraints' must be an array");
    }
    for (const auto& c : j.at("constraints")) {
      cd::reject_unknown_keys(c, {"scope", "subspace", "metric", "op", "bound"},
                              "constraint");
      for (const char* key : {"scope", "metric", "op", "bound"}) {
        if (!c.contains(key)) {
          throw ValidationError(std::string("constraint requires '") + key +
                                "'");
        }
      }
      ConstraintSpec spec;
      const std::string scope = c.at("scope").get<std::string>();
      if (scope == "local") {
        spec.scope = Scope::kLocal;
      } else if (scope == "global") {
        spec.scope = Scope::kGlobal;
      } else {
        throw ValidationError("scope must be 'local' or 'global'");
      }
      if (c.contains("subspace")) {
        spec.subspace = c.at("subspace").get<std::string>();
      }
      spec.metric = MetricKind::parse(c.at("metric").get<std::string>());
      const std::string op = c.at("op").get<std::string>();
      if (op == "<=") {
        spec.op = CmpOp::kLe;
      } else if (op == ">=") {
        spec.op = CmpOp::kGe;
      } else {
        throw ValidationError("op must be '<=' or '>='");
      }
      spec.bound = cd::json_to_rat(c.at("bound"), "constraint bound");
      config.constraints.push_back(std::move(spec));
    }
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    cd::reject_unknown_keys(g, {"mode", "step"}, "grid");
    if (g.contains("mode")) {
      const std::string mode = g.at("mode").get<std::string>();
      if (mode == "uniform") {
        config.grid.mode = GridMode::kUniform;
      } else if (mode == "unique-scores") {
        config.grid.mode = GridMode::kUniqueScores;
      } else {
        throw ValidationError("grid mode must be 'uniform' or 'unique-scores'");
      }
    }
    if (g.contains("step")) {
      config.grid.step = cd::json_to_rat(g.at("step"), "grid step");
      if (!(config.grid.step > 0 && config.grid.step <= 1)) {
        throw ValidationError("grid step must satisfy 0 < step <= 1");
      }
    }
  }
  if (j.contains("report_metrics")) {
    for (const auto& m : j.at("report_metrics")) {
      config.report_metrics.push_back(
          MetricKind::parse(m.get<std::string>()));
    }
  }
  return config;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path, 0, "cannot open config file");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
  try {
    return parse_config(j);
  } catch (const ValidationError& e) {
    throw ParseError(path, 0, e.what());
  }
}

/// Canonical re-serialization of a parsed config, used as the report's
/// config echo. Key order is fixed; rational values are exact strings.
inline nlohmann::ordered_json config_echo(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["objective"] = {
      {"metric", config.objective.metric.name()},
      {"direction", config.objective.direction == Direction::kMinimize
                        ? "minimize"
                        : "maximize"}};
  nlohmann::ordered_json constraints = nlohmann::ordered_json::array();
  for (const auto& spec : config.constraints) {
    nlohmann::ordered_json c;
    c["scope"] = spec.scope == Scope::kLocal ? "local" : "global";
    if (spec.subspace) c["subspace"] = *spec.subspace;
    c["metric"] = spec.metric.name();
    c["op"] = std::string(op_string(spec.op));
    c["bound"] = rat_string(spec.bound);
    constraints.push_back(std::move(c));
  }
  j["constraints"] = std::move(constraints);
  j["grid"] = {{"mode", config.grid.mode == GridMode::kUniform
                            ? "uniform"
                            : "unique-scores"},
               {"step", rat_string(config.grid.step)}};
  return j;
}

}  // namespace otlp
