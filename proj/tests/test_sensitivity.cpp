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

#include "otlp/sensitivity.hpp"

#include <gtest/gtest.h>

#include <random>

#include "testutil.hpp"

namespace {

using otlp::ScoredInstance;
using otlp::ThresholdGrid;

TEST(Classify, ThresholdRuleIsAtOrAbove) {
  EXPECT_EQ(otlp::classify(0.56, 0.5), 1);
  EXPECT_EQ(otlp::classify(0.4, 0.5), 0);
  EXPECT_EQ(otlp::classify(0.61, 0.5), 1);
  EXPECT_EQ(otlp::classify(0.14, 0.5), 0);
  EXPECT_EQ(otlp::classify(0.88, 0.5), 1);
  // Ties go to the positive class.
  EXPECT_EQ(otlp::classify(0.5, 0.5), 1);
  EXPECT_EQ(otlp::classify(0.0, 0.0), 1);
  EXPECT_EQ(otlp::classify(1.0, 1.0), 1);
}

TEST(Classify, RejectsOutOfRange) {
  EXPECT_THROW(otlp::classify(-0.1, 0.5), otlp::ValidationError);
  EXPECT_THROW(otlp::classify(1.1, 0.5), otlp::ValidationError);
  EXPECT_THROW(otlp::classify(0.5, -0.1), otlp::ValidationError);
  EXPECT_THROW(otlp::classify(0.5, 1.5), otlp::ValidationError);
}

TEST(Grid, UniformQuarterStep) {
  const ThresholdGrid grid = otlp::build_uniform_grid(otlp::make_rat(1, 4));
  const std::vector<double> expected = {0.0, 0.25, 0.5, 0.75, 1.0};
  EXPECT_EQ(grid.thresholds, expected);
}

TEST(Grid, DefaultLatticeHitsReportedThresholds) {
  const ThresholdGrid grid = otlp::build_uniform_grid(otlp::make_rat(1, 200));
  ASSERT_EQ(grid.thresholds.size(), 201u);
  EXPECT_EQ(grid.thresholds[49], 0.245);
  EXPECT_EQ(grid.thresholds[101], 0.505);
  EXPECT_EQ(grid.thresholds[181], 0.905);
  EXPECT_EQ(grid.thresholds.front(), 0.0);
  EXPECT_EQ(grid.thresholds.back(), 1.0);
  for (std::size_t i = 1; i < grid.thresholds.size(); ++i) {
    EXPECT_NEAR(grid.thresholds[i] - grid.thresholds[i - 1], 0.005, 1e-15);
  }
}

TEST(Grid, NonDividingStepAppendsOne) {
  const ThresholdGrid grid = otlp::build_uniform_grid(otlp::make_rat(3, 10));
  const std::vector<double> expected = {0.0, 0.3, 0.6, 0.9, 1.0};
  EXPECT_EQ(grid.thresholds, expected);
}

TEST(Grid, UniqueScoresDedupsAndAddsSentinel) {
  const std::vector<ScoredInstance> instances = {
      {0.4, 1, "", {}}, {0.56, 0, "", {}}, {0.4, 0, "", {}}};
  const ThresholdGrid grid = otlp::build_unique_scores_grid(instances);
  const std::vector<double> expected = {0.0, 0.4, 0.56};
  EXPECT_EQ(grid.thresholds, expected);
  EXPECT_EQ(grid.mode, otlp::GridMode::kUniqueScores);
}

TEST(Grid, Errors) {
  EXPECT_THROW(otlp::build_uniform_grid(otlp::Rat(0)), otlp::ValidationError);
  EXPECT_THROW(otlp::build_uniform_grid(otlp::Rat(2)), otlp::ValidationError);
  EXPECT_THROW(otlp::build_uniform_grid(otlp::make_rat(-1, 4)),
               otlp::ValidationError);
  EXPECT_THROW(otlp::build_unique_scores_grid({}), otlp::ValidationError);
}

TEST(Sensitivity, TwoInstanceEnumeration) {
  const std::vector<ScoredInstance> instances = {{0.9, 1, "", {}},
                                                 {0.2, 0, "", {}}};
  ThresholdGrid grid;
  grid.thresholds = {0.0, 0.5, 1.0};
  const auto tables = otlp::build_sensitivity(instances, grid);
  ASSERT_EQ(tables.size(), 1u);
  const otlp::SensitivityTable& t = tables.begin()->second;
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0].tp, 1);
  EXPECT_EQ(t.rows[0].fp, 1);
  EXPECT_EQ(t.rows[0].tn, 0);
  EXPECT_EQ(t.rows[0].fn, 0);
  EXPECT_EQ(t.rows[1].tp, 1);
  EXPECT_EQ(t.rows[1].fp, 0);
  EXPECT_EQ(t.rows[1].tn, 1);
  EXPECT_EQ(t.rows[1].fn, 0);
  EXPECT_EQ(t.rows[2].tp, 0);
  EXPECT_EQ(t.rows[2].fp, 0);
  EXPECT_EQ(t.rows[2].tn, 1);
  EXPECT_EQ(t.rows[2].fn, 1);
}

TEST(Sensitivity, ThresholdZeroSaturates) {
  std::mt19937 rng(7);
  const auto instances = otlp_test::random_instances(rng, 100);
  ThresholdGrid grid;
  grid.thresholds = {0.0};
  const auto tables = otlp::build_sensitivity(instances, grid);
  const otlp::SensitivityTable& t = tables.begin()->second;
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].tp, t.positive_count);
  EXPECT_EQ(t.rows[0].fp, t.negative_count);
  EXPECT_EQ(t.rows[0].tn, 0);
  EXPECT_EQ(t.rows[0].fn, 0);
}

TEST(Sensitivity, ReproducesWorkedSheet) {
  const auto tables = otlp::build_sensitivity(
      otlp_test::table2_instances(),
      otlp::build_uniform_grid(otlp::make_rat(1, 200)));
  const otlp::SensitivityTable& t = tables.begin()->second;
  EXPECT_EQ(t.positive_count, 50);
  EXPECT_EQ(t.negative_count, 100);
  const otlp::SensitivityTable expected = otlp_test::table2();
  for (const auto& want : expected.rows) {
    bool found = false;
    for (const auto& got : t.rows) {
      if (got.threshold == want.threshold) {
        EXPECT_EQ(got.tp, want.tp) << "t=" << want.threshold;
        EXPECT_EQ(got.fp, want.fp) << "t=" << want.threshold;
        EXPECT_EQ(got.tn, want.tn) << "t=" << want.threshold;
        EXPECT_EQ(got.fn, want.fn) << "t=" << want.threshold;
        found = true;
      }
    }
    EXPECT_TRUE(found) << "missing grid row at t=" << want.threshold;
  }
}

TEST(Sensitivity, Errors) {
  ThresholdGrid grid;
  grid.thresholds = {0.0, 0.5};
  EXPECT_THROW(otlp::build_sensitivity({}, grid), otlp::ValidationError);
  // Mixed cost presence.
  std::vector<ScoredInstance> mixed = {{0.5, 1, "", otlp::Rat(1)},
                                       {0.6, 0, "", {}}};
  EXPECT_THROW(otlp::build_sensitivity(mixed, grid), otlp::ValidationError);
  // Invalid instances.
  std::vector<ScoredInstance> bad_score = {{1.5, 1, "", {}}};
  EXPECT_THROW(otlp::build_sensitivity(bad_score, grid),
               otlp::ValidationError);
  std::vector<ScoredInstance> bad_label = {{0.5, 2, "", {}}};
  EXPECT_THROW(otlp::build_sensitivity(bad_label, grid),
               otlp::ValidationError);
}

// Conservation, monotonicity, agreement with classify(), and the subspace
// partition property, on randomized instance sets.
TEST(Sensitivity, RandomizedInvariants) {
  std::mt19937 rng(20260809);
  for (int iter = 0; iter < 60; ++iter) {
    const int subspaces = 1 + iter % 3;
    const bool with_cost = iter % 2 == 0;
    const auto instances =
        otlp_test::random_instances(rng, 50 + iter * 7, subspaces, with_cost);
    const ThresholdGrid grid =
        iter % 4 == 0 ? otlp::build_unique_scores_grid(instances)
                      : otlp::build_uniform_grid(otlp::make_rat(
                            1, 5 + static_cast<int>(rng() % 40)));
    const auto tables = otlp::build_sensitivity(instances, grid);

    std::int64_t total_instances = 0;
    for (const auto& [key, table] : tables) {
      total_instances += table.positive_count + table.negative_count;
      ASSERT_EQ(table.rows.size(), grid.thresholds.size());
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        EXPECT_EQ(row.tp + row.fn, table.positive_count);
        EXPECT_EQ(row.fp + row.tn, table.negative_count);
        EXPECT_EQ(row.tp_cost + row.fn_cost,
                  table.rows[0].tp_cost + table.rows[0].fn_cost);
        if (i > 0) {
          const auto& prev = table.rows[i - 1];
          EXPECT_LE(row.tp, prev.tp);
          EXPECT_LE(row.fp, prev.fp);
          EXPECT_GE(row.tn, prev.tn);
          EXPECT_GE(row.fn, prev.fn);
          EXPECT_TRUE(row.tp_cost <= prev.tp_cost);
          EXPECT_TRUE(row.fp_cost <= prev.fp_cost);
          EXPECT_TRUE(row.tn_cost >= prev.tn_cost);
          EXPECT_TRUE(row.fn_cost >= prev.fn_cost);
        }
      }
      // Spot-check cells against a direct classify() loop.
      for (std::size_t i = 0; i < table.rows.size(); i += 7) {
        const auto& row = table.rows[i];
        std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (const auto& inst : instances) {
          if (inst.subspace != key) continue;
          const int predicted = otlp::classify(inst.score, row.threshold);
          tp += predicted == 1 && inst.label == 1;
          fp += predicted == 1 && inst.label == 0;
          tn += predicted == 0 && inst.label == 0;
          fn += predicted == 0 && inst.label == 1;
        }
        EXPECT_EQ(row.tp, tp);
        EXPECT_EQ(row.fp, fp);
        EXPECT_EQ(row.tn, tn);
        EXPECT_EQ(row.fn, fn);
      }
    }
    EXPECT_EQ(total_instances, static_cast<std::int64_t>(instances.size()));

    // Partition: per-subspace tables at a common grid sum to the pooled table.
    std::vector<ScoredInstance> pooled = instances;
    for (auto& inst : pooled) inst.subspace.clear();
    const auto pooled_tables = otlp::build_sensitivity(pooled, grid);
    const otlp::SensitivityTable& united = pooled_tables.begin()->second;
    for (std::size_t i = 0; i < united.rows.size(); ++i) {
      std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
      for (const auto& [key, table] : tables) {
        tp += table.rows[i].tp;
        fp += table.rows[i].fp;
        tn += table.rows[i].tn;
        fn += table.rows[i].fn;
      }
      EXPECT_EQ(united.rows[i].tp, tp);
      EXPECT_EQ(united.rows[i].fp, fp);
      EXPECT_EQ(united.rows[i].tn, tn);
      EXPECT_EQ(united.rows[i].fn, fn);
    }
  }
}

}  // namespace
