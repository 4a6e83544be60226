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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "otlp/error.hpp"
#include "otlp/rational.hpp"

namespace otlp {

/// One scored validation-set record.
struct ScoredInstance {
  double score = 0.0;       // classifier probability estimate, in [0,1]
  int label = 0;            // actual class, 0 or 1
  std::string subspace;     // empty key = the single implicit subspace
  std::optional<Rat> cost;  // optional non-negative per-instance weight
};

inline void validate_instance(const ScoredInstance& inst) {
  if (!(inst.score >= 0.0 && inst.score <= 1.0)) {
    throw ValidationError("score out of range [0,1]");
  }
  if (inst.label != 0 && inst.label != 1) {
    throw ValidationError("label must be 0 or 1");
  }
  if (inst.cost && *inst.cost < 0) {
    throw ValidationError("cost must be non-negative");
  }
}

enum class GridMode { kUniform, kUniqueScores };

struct GridSpec {
  GridMode mode = GridMode::kUniform;
  Rat step = make_rat(1, 200);  // 0.005
};

struct ThresholdGrid {
  GridMode mode = GridMode::kUniform;
  std::vector<double> thresholds;  // strictly increasing, within [0,1]
};

/// Confusion counts and cost aggregates at one threshold. Cost aggregates are
/// exact sums of the per-instance cost over each confusion cell; all zero when
/// the data carries no costs.
struct ThresholdRow {
  double threshold = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;
  Rat tp_cost;
  Rat fp_cost;
  Rat tn_cost;
  Rat fn_cost;
};

/// Per-subspace sheet: one ThresholdRow per grid threshold, ascending.
struct SensitivityTable {
  std::string subspace;
  std::vector<ThresholdRow> rows;
  std::int64_t positive_count = 0;
  std::int64_t negative_count = 0;
  bool has_cost = false;
};

using SensitivityMap = std::map<std::string, SensitivityTable>;

}  // namespace otlp
