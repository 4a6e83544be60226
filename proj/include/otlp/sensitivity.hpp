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

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "otlp/error.hpp"
#include "otlp/rational.hpp"
#include "otlp/types.hpp"

namespace otlp {

/// Score-to-label rule: scores at or above the threshold are assigned the
/// positive class. Ties at the threshold go positive.
inline int classify(double score, double threshold) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw ValidationError("score out of range [0,1]");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ValidationError("threshold out of range [0,1]");
  }
  return score >= threshold ? 1 : 0;
}

/// Grid {0, step, 2*step, ..., 1}; 1 is appended when the step does not divide
/// it. Thresholds are generated from exact rationals so lattice points like
/// 0.245 or 0.905 round-trip through their shortest decimal form.
inline ThresholdGrid build_uniform_grid(const Rat& step) {
  if (!(step > 0 && step <= 1)) {
    throw ValidationError("grid step must satisfy 0 < step <= 1");
  }
  ThresholdGrid grid;
  grid.mode = GridMode::kUniform;
  for (BigInt i = 0;; ++i) {
    const Rat t = Rat(i) * step;
    if (t > 1) break;
    grid.thresholds.push_back(to_double(t));
  }
  if (grid.thresholds.back() != 1.0) {
    grid.thresholds.push_back(1.0);
  }
  for (std::size_t i = 1; i < grid.thresholds.size(); ++i) {
    if (!(grid.thresholds[i] > grid.thresholds[i - 1])) {
      throw ValidationError("grid step too small to represent distinctly");
    }
  }
  return grid;
}

/// Sorted distinct scores plus the 0.0 sentinel (the all-positive row).
inline ThresholdGrid build_unique_scores_grid(
    const std::vector<ScoredInstance>& instances) {
  if (instances.empty()) {
    throw ValidationError("unique-scores grid requires at least one instance");
  }
  ThresholdGrid grid;
  grid.mode = GridMode::kUniqueScores;
  grid.thresholds.reserve(instances.size() + 1);
  for (const auto& inst : instances) {
    validate_instance(inst);
    grid.thresholds.push_back(inst.score);
  }
  std::sort(grid.thresholds.begin(), grid.thresholds.end());
  grid.thresholds.erase(
      std::unique(grid.thresholds.begin(), grid.thresholds.end()),
      grid.thresholds.end());
  if (grid.thresholds.front() != 0.0) {
    grid.thresholds.insert(grid.thresholds.begin(), 0.0);
  }
  return grid;
}

inline ThresholdGrid build_grid(const GridSpec& spec,
                                const std::vector<ScoredInstance>& instances =
                                    std::vector<ScoredInstance>()) {
  if (spec.mode == GridMode::kUniform) {
    return build_uniform_grid(spec.step);
  }
  return build_unique_scores_grid(instances);
}

/// Builds one sensitivity table per distinct subspace key. Counting is one
/// sort per subspace followed by a single sweep over the grid, never
/// O(instances * thresholds).
inline SensitivityMap build_sensitivity(
    const std::vector<ScoredInstance>& instances, const ThresholdGrid& grid) {
  if (instances.empty()) {
    throw ValidationError("no instances");
  }
  if (grid.thresholds.empty()) {
    throw ValidationError("empty threshold grid");
  }
  std::size_t with_cost = 0;
  for (const auto& inst : instances) {
    validate_instance(inst);
    if (inst.cost) ++with_cost;
  }
  if (with_cost != 0 && with_cost != instances.size()) {
    throw ValidationError(
        "cost must be present on every instance or on none");
  }
  const bool has_cost = with_cost == instances.size();

  struct Item {
    double score;
    int label;
    Rat cost;
  };
  std::map<std::string, std::vector<Item>> by_subspace;
  for (const auto& inst : instances) {
    by_subspace[inst.subspace].push_back(
        Item{inst.score, inst.label, inst.cost ? *inst.cost : Rat(0)});
  }

  SensitivityMap result;
  for (auto& [key, items] : by_subspace) {
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.score < b.score; });
    SensitivityTable table;
    table.subspace = key;
    table.has_cost = has_cost;
    Rat pos_cost_total, neg_cost_total;
    for (const auto& item : items) {
      if (item.label == 1) {
        ++table.positive_count;
        pos_cost_total += item.cost;
      } else {
        ++table.negative_count;
        neg_cost_total += item.cost;
      }
    }
    table.rows.reserve(grid.thresholds.size());
    std::size_t next = 0;  // first item with score >= current threshold
    std::int64_t fn = 0, tn = 0;
    Rat fn_cost, tn_cost;
    for (const double t : grid.thresholds) {
      while (next < items.size() && items[next].score < t) {
        if (items[next].label == 1) {
          ++fn;
          fn_cost += items[next].cost;
        } else {
          ++tn;
          tn_cost += items[next].cost;
        }
        ++next;
      }
      ThresholdRow row;
      row.threshold = t;
      row.fn = fn;
      row.tn = tn;
      row.tp = table.positive_count - fn;
      row.fp = table.negative_count - tn;
      row.fn_cost = fn_cost;
      row.tn_cost = tn_cost;
      row.tp_cost = pos_cost_total - fn_cost;
      row.fp_cost = neg_cost_total - tn_cost;
      table.rows.push_back(std::move(row));
    }
    result.emplace(key, std::move(table));
  }
  return result;
}

}  // namespace otlp
