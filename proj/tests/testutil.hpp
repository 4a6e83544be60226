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

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "otlp/metrics.hpp"
#include "otlp/model.hpp"
#include "otlp/rational.hpp"
#include "otlp/sensitivity.hpp"
#include "otlp/types.hpp"

namespace otlp_test {

// The worked sensitivity-sheet example used across the suite: five candidate
// thresholds over 50 positives and 100 negatives.
//   t=0.05: 48/15/85/2   t=0.1: 45/10/90/5   t=0.35: 40/5/95/10
//   t=0.55: 35/3/97/15   t=0.71: 30/2/98/20
// The optional cost columns decompose the sheet's total-cost pattern
// (160,125,100,105,120 under weights 0,1,0,1) into monotone per-cell
// aggregates.
inline otlp::SensitivityTable table2(bool with_costs = false) {
  otlp::SensitivityTable table;
  table.subspace = "";
  table.positive_count = 50;
  table.negative_count = 100;
  table.has_cost = with_costs;
  const double thresholds[] = {0.05, 0.1, 0.35, 0.55, 0.71};
  const std::int64_t tp[] = {48, 45, 40, 35, 30};
  const std::int64_t fp[] = {15, 10, 5, 3, 2};
  const std::int64_t fp_cost[] = {150, 100, 50, 30, 20};
  const std::int64_t fn_cost[] = {10, 25, 50, 75, 100};
  for (int i = 0; i < 5; ++i) {
    otlp::ThresholdRow row;
    row.threshold = thresholds[i];
    row.tp = tp[i];
    row.fp = fp[i];
    row.fn = 50 - tp[i];
    row.tn = 100 - fp[i];
    if (with_costs) {
      row.fp_cost = otlp::Rat(fp_cost[i]);
      row.fn_cost = otlp::Rat(fn_cost[i]);
    }
    table.rows.push_back(row);
  }
  return table;
}

inline otlp::SensitivityMap table2_map(bool with_costs = false) {
  otlp::SensitivityMap m;
  m.emplace("", table2(with_costs));
  return m;
}

// Instance multiset whose sensitivity table reproduces table2's counts at
// the five thresholds (all of which lie on the default 0.005 lattice).
inline std::vector<otlp::ScoredInstance> table2_instances() {
  std::vector<otlp::ScoredInstance> out;
  const auto add = [&](int n, double score, int label) {
    for (int i = 0; i < n; ++i) {
      out.push_back(otlp::ScoredInstance{score, label, "", {}});
    }
  };
  add(2, 0.02, 1);
  add(3, 0.05, 1);
  add(5, 0.1, 1);
  add(5, 0.35, 1);
  add(5, 0.55, 1);
  add(30, 0.71, 1);
  add(85, 0.02, 0);
  add(5, 0.05, 0);
  add(5, 0.1, 0);
  add(2, 0.35, 0);
  add(1, 0.55, 0);
  add(2, 0.71, 0);
  return out;
}

// The sheet's five-row CSV form, for CLI tests.
inline std::string table2_sheet_csv() {
  const otlp::SensitivityTable t = table2(/*with_costs=*/true);
  std::string csv =
      "subspace,threshold,tp,fp,tn,fn,tp_cost,fp_cost,tn_cost,fn_cost\n";
  for (const auto& row : t.rows) {
    csv += "," + otlp::format_double(row.threshold) + "," +
           std::to_string(row.tp) + "," + std::to_string(row.fp) + "," +
           std::to_string(row.tn) + "," + std::to_string(row.fn) + ",0," +
           otlp::rat_string(row.fp_cost) + ",0," +
           otlp::rat_string(row.fn_cost) + "\n";
  }
  return csv;
}

inline std::vector<otlp::ScoredInstance> random_instances(
    std::mt19937& rng, int n, int subspaces = 1, bool with_cost = false) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<int> sub(0, subspaces - 1);
  std::uniform_int_distribution<int> cost_cents(0, 5000);
  std::bernoulli_distribution positive(0.2 + 0.6 * uni(rng));
  std::vector<otlp::ScoredInstance> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    otlp::ScoredInstance inst;
    // Mix exact lattice scores with arbitrary doubles.
    inst.score = (i % 3 == 0) ? std::round(uni(rng) * 20.0) / 20.0 : uni(rng);
    inst.label = positive(rng) ? 1 : 0;
    if (subspaces > 1) inst.subspace = "s" + std::to_string(sub(rng));
    if (with_cost) inst.cost = otlp::Rat(cost_cents(rng), 100);
    out.push_back(std::move(inst));
  }
  return out;
}

inline otlp::SensitivityTable random_table(std::mt19937& rng,
                                           int max_candidates = 60,
                                           bool with_cost = false) {
  std::uniform_int_distribution<int> n_dist(10, 200);
  std::uniform_int_distribution<int> k_dist(4, max_candidates - 1);
  const auto instances = random_instances(rng, n_dist(rng), 1, with_cost);
  const otlp::ThresholdGrid grid =
      otlp::build_uniform_grid(otlp::make_rat(1, k_dist(rng)));
  return otlp::build_sensitivity(instances, grid).begin()->second;
}

// ---------------------------------------------------------------------------
// Independent feasibility oracle: recomputes each metric from the counts with
// its own arithmetic instead of going through row_satisfies.

inline bool oracle_satisfies(const otlp::ThresholdRow& row,
                             const otlp::MetricKind& metric, otlp::CmpOp op,
                             const otlp::Rat& bound) {
  using otlp::BigInt;
  using otlp::Rat;
  const std::int64_t tp = row.tp, fp = row.fp, tn = row.tn, fn = row.fn;
  const auto leq = [&](const Rat& v) {
    return op == otlp::CmpOp::kLe ? v <= bound : v >= bound;
  };
  switch (metric.id) {
    case otlp::Metric::kTp:
      return leq(Rat(tp));
    case otlp::Metric::kFp:
      return leq(Rat(fp));
    case otlp::Metric::kTn:
      return leq(Rat(tn));
    case otlp::Metric::kFn:
      return leq(Rat(fn));
    case otlp::Metric::kPredictedPositive:
      return leq(Rat(tp) + Rat(fp));
    case otlp::Metric::kPrecision:
      if (tp + fp == 0) return false;
      return leq(Rat(tp) / Rat(tp + fp));
    case otlp::Metric::kRecall:
      if (tp + fn == 0) return false;
      return leq(Rat(tp) / Rat(tp + fn));
    case otlp::Metric::kFBeta: {
      if (tp == 0 || tp + fp == 0 || tp + fn == 0) return false;
      const Rat b2 = metric.beta * metric.beta;
      const Rat p = Rat(tp) / Rat(tp + fp);
      const Rat r = Rat(tp) / Rat(tp + fn);
      const Rat den = b2 * p + r;
      if (den == 0) return false;
      return leq((1 + b2) * p * r / den);
    }
    case otlp::Metric::kAccuracy: {
      const std::int64_t n = tp + fp + tn + fn;
      if (n == 0) return false;
      return leq(Rat(tp + tn) / Rat(n));
    }
    case otlp::Metric::kKappa: {
      const std::int64_t n = tp + fp + tn + fn;
      if (n == 0) return false;
      const Rat po = Rat(tp + tn) / Rat(n);
      const Rat pe = (Rat(tp + fp) * Rat(tp + fn) + Rat(fn + tn) * Rat(fp + tn)) /
                     (Rat(n) * Rat(n));
      if (pe == 1) return false;
      return leq((po - pe) / (1 - pe));
    }
    case otlp::Metric::kMcc: {
      if (tp + fp == 0 || tp + fn == 0 || tn + fp == 0 || tn + fn == 0) {
        return false;
      }
      // mcc op b  <=>  s op b*sqrt(d): resolve by sign cases and squares.
      const Rat s = Rat(BigInt(tp) * tn - BigInt(fp) * fn);
      const Rat d = Rat(BigInt(tp + fp) * BigInt(tp + fn) * BigInt(tn + fp) *
                        BigInt(tn + fn));
      const Rat rhs_sq = bound * bound * d;
      if (op == otlp::CmpOp::kGe) {
        if (bound < 0) return s >= 0 || s * s <= rhs_sq;
        return s >= 0 && s * s >= rhs_sq;
      }
      if (bound >= 0) return s <= 0 || s * s <= rhs_sq;
      return s <= 0 && s * s >= rhs_sq;
    }
    case otlp::Metric::kGMean: {
      if (tp + fn == 0 || tn + fp == 0) return false;
      const Rat square = (Rat(tp) / Rat(tp + fn)) * (Rat(tn) / Rat(tn + fp));
      if (op == otlp::CmpOp::kGe) return bound <= 0 || square >= bound * bound;
      return bound >= 0 && square <= bound * bound;
    }
    case otlp::Metric::kTpCost:
      return leq(row.tp_cost);
    case otlp::Metric::kFpCost:
      return leq(row.fp_cost);
    case otlp::Metric::kTnCost:
      return leq(row.tn_cost);
    case otlp::Metric::kFnCost:
      return leq(row.fn_cost);
    case otlp::Metric::kTotalCost:
      return leq(metric.weights[0] * row.tp_cost +
                 metric.weights[1] * row.fp_cost +
                 metric.weights[2] * row.tn_cost +
                 metric.weights[3] * row.fn_cost);
  }
  return false;
}

// ---------------------------------------------------------------------------
// CLI helpers.

inline std::string cli_path() {
  const char* env = std::getenv("OTLP_CLI");
  return env == nullptr ? std::string() : std::string(env);
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr merged
};

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

inline CliResult run_cli(const std::vector<std::string>& args,
                         const std::string& env_prefix = std::string()) {
  std::string cmd = env_prefix.empty() ? "" : env_prefix + " ";
  cmd += shell_quote(cli_path());
  for (const auto& arg : args) {
    cmd += " " + shell_quote(arg);
  }
  cmd += " 2>&1";
  CliResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.output.append(buf, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::mt19937_64 rng{std::random_device{}()};
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    const auto dir = base / ("otlp_" + tag + "_" + std::to_string(rng()));
    if (std::filesystem::create_directory(dir)) return dir;
  }
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

}  // namespace otlp_test
