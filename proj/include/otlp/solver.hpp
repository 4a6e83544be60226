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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otlp/error.hpp"
#include "otlp/log.hpp"
#include "otlp/model.hpp"
#include "otlp/rational.hpp"
#include "otlp/simplex.hpp"

namespace otlp {

struct SolveOptions {
  std::int64_t node_limit = 1'000'000;
  // Budget ceiling for the multiple-choice-knapsack fast path.
  std::int64_t dp_budget_limit = 100'000;
  bool enable_knapsack_dp = true;
  // Disables the dive that seeds the incumbent (testing hook; the
  // branch-and-bound result must not depend on it).
  bool enable_initial_incumbent = true;
};

/// LP relaxation of the full problem: selection variables relaxed to [0,1].
struct LpRelaxationResult {
  bool feasible = false;
  double bound = 0.0;  // in the problem's own sense; valid bound on the IP
  std::vector<std::vector<double>> weights;  // [group][candidate]
  std::int64_t iterations = 0;
};

namespace solver_detail {

// Absolute tolerance for float objective ties; within it the lexicographic
// threshold tie-break decides.
constexpr double kTieTol = 1e-12;

// Tuple objective in minimization sense. `i` is the exact scaled-integer
// value, meaningful only when the core is exact.
struct TotalObj {
  double d = 0.0;
  std::int64_t i = 0;
};

struct ScaledRow {
  std::vector<std::vector<std::int64_t>> w;  // [group][candidate]
  CmpOp op = CmpOp::kLe;
  std::int64_t rhs = 0;
  bool integral = true;  // the original coefficients were integers
};

// Solver-internal view of a SelectionProblem: minimization sense, coupling
// rows scaled to exact int64 through the lcm of their denominators, and the
// objective additionally scaled to int64 when it is rational-valued.
struct Core {
  const SelectionProblem* problem = nullptr;
  bool maximize = false;
  bool exact = false;
  double unit = 0.0;  // value of one objective integer step, exact cores only
  std::vector<std::vector<double>> obj;
  std::vector<std::vector<std::int64_t>> obj_i;
  std::vector<ScaledRow> rows;
  double scale = 1.0;
  double eps = 1e-8;

  std::size_t num_groups() const { return obj.size(); }
  int group_size(std::size_t g) const { return static_cast<int>(obj[g].size()); }
};

inline int cmp_total(const Core& core, const TotalObj& a, const TotalObj& b) {
  if (core.exact) {
    return a.i < b.i ? -1 : (a.i > b.i ? 1 : 0);
  }
  if (a.d < b.d - kTieTol) return -1;
  if (a.d > b.d + kTieTol) return 1;
  return 0;
}

inline void add_candidate(const Core& core, TotalObj& t, std::size_t g,
                          int c) {
  t.d += core.obj[g][c];
  if (core.exact) t.i += core.obj_i[g][c];
}

inline Core build_core(const SelectionProblem& problem) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::lcm;
  using boost::multiprecision::numerator;
  static const BigInt kMaxMagnitude = BigInt(1) << 62;

  Core core;
  core.problem = &problem;
  core.maximize = problem.objective.direction == Direction::kMaximize;
  const std::size_t k = problem.groups.size();
  core.obj.resize(k);
  bool exact = true;
  for (std::size_t g = 0; g < k; ++g) {
    const auto& cands = problem.groups[g].candidates;
    if (cands.empty()) {
      throw ValidationError("group '" + problem.groups[g].subspace +
                            "' has no candidates");
    }
    double group_max = 0.0;
    core.obj[g].reserve(cands.size());
    for (const auto& cand : cands) {
      const double v = core.maximize ? -cand.objective : cand.objective;
      core.obj[g].push_back(v);
      group_max = std::max(group_max, std::fabs(v));
      exact = exact && cand.objective_exact.has_value();
    }
    core.scale += group_max;
  }
  core.eps = 1e-8 * core.scale;

  if (exact) {
    BigInt l = 1;
    for (const auto& group : problem.groups) {
      for (const auto& cand : group.candidates) {
        l = lcm(l, denominator(*cand.objective_exact));
      }
    }
    BigInt total = 0;
    for (const auto& group : problem.groups) {
      BigInt group_max = 0;
      for (const auto& cand : group.candidates) {
        const BigInt v =
            BigInt(boost::multiprecision::abs(
                numerator(*cand.objective_exact) *
                (l / denominator(*cand.objective_exact))));
        if (v > group_max) group_max = v;
      }
      total += group_max;
    }
    if (total >= kMaxMagnitude) {
      exact = false;  // degrade to the float-with-tolerance comparator
    } else {
      core.obj_i.resize(k);
      for (std::size_t g = 0; g < k; ++g) {
        const auto& cands = problem.groups[g].candidates;
        core.obj_i[g].reserve(cands.size());
        for (const auto& cand : cands) {
          const BigInt v = numerator(*cand.objective_exact) *
                           (l / denominator(*cand.objective_exact));
          const std::int64_t vi = v.convert_to<std::int64_t>();
          core.obj_i[g].push_back(core.maximize ? -vi : vi);
        }
      }
      core.unit = 1.0 / to_double(Rat(l));
    }
  }
  core.exact = exact;

  for (const auto& coupling : problem.couplings) {
    BigInt l = denominator(coupling.bound);
    for (const auto& group_coeffs : coupling.coeffs) {
      for (const auto& c : group_coeffs) {
        l = lcm(l, denominator(c));
      }
    }
    BigInt total = BigInt(boost::multiprecision::abs(
        numerator(coupling.bound) * (l / denominator(coupling.bound))));
    for (const auto& group_coeffs : coupling.coeffs) {
      BigInt group_max = 0;
      for (const auto& c : group_coeffs) {
        const BigInt v = BigInt(
            boost::multiprecision::abs(numerator(c) * (l / denominator(c))));
        if (v > group_max) group_max = v;
      }
      total += group_max;
    }
    if (total >= kMaxMagnitude) {
      throw ValidationError(
          "constraint '" + coupling.source.describe() +
          "' exceeds the exact integer range supported by the solver");
    }
    ScaledRow row;
    row.op = coupling.op;
    row.integral = l == 1;
    row.rhs = BigInt(numerator(coupling.bound) * (l / denominator(coupling.bound)))
                  .convert_to<std::int64_t>();
    row.w.resize(k);
    for (std::size_t g = 0; g < k; ++g) {
      const auto& group_coeffs = coupling.coeffs[g];
      row.w[g].reserve(group_coeffs.size());
      for (const auto& c : group_coeffs) {
        row.w[g].push_back(
            BigInt(numerator(c) * (l / denominator(c))).convert_to<std::int64_t>());
      }
    }
    core.rows.push_back(std::move(row));
  }
  return core;
}

struct SubLp {
  bool feasible = false;
  double objective = 0.0;
  std::vector<std::vector<double>> x;  // [group offset][var within range]
};

// LP relaxation of the groups [from, K) restricted to per-group index ranges,
// against residual coupling bounds. Rows are normalized by their largest
// coefficient before hitting the simplex.
inline SubLp solve_group_lp(const Core& core, std::size_t from,
                            const std::vector<std::pair<int, int>>& ranges,
                            const std::vector<std::int64_t>& rhs,
                            std::int64_t& lp_iterations) {
  const std::size_t sub = core.num_groups() - from;
  std::vector<std::size_t> offsets(sub);
  std::size_t nvars = 0;
  for (std::size_t i = 0; i < sub; ++i) {
    offsets[i] = nvars;
    nvars += static_cast<std::size_t>(ranges[i].second - ranges[i].first);
  }
  std::vector<double> c(nvars);
  for (std::size_t i = 0; i < sub; ++i) {
    for (int j = ranges[i].first; j < ranges[i].second; ++j) {
      c[offsets[i] + (j - ranges[i].first)] = core.obj[from + i][j];
    }
  }
  std::vector<LpRow> lp_rows;
  for (std::size_t i = 0; i < sub; ++i) {
    LpRow eq;
    eq.coeffs.assign(nvars, 0.0);
    for (int j = ranges[i].first; j < ranges[i].second; ++j) {
      eq.coeffs[offsets[i] + (j - ranges[i].first)] = 1.0;
    }
    eq.type = LpRowType::kEq;
    eq.rhs = 1.0;
    lp_rows.push_back(std::move(eq));
  }
  for (std::size_t r = 0; r < core.rows.size(); ++r) {
    const ScaledRow& row = core.rows[r];
    double norm = 0.0;
    for (std::size_t i = 0; i < sub; ++i) {
      for (int j = ranges[i].first; j < ranges[i].second; ++j) {
        norm = std::max(norm,
                        std::fabs(static_cast<double>(row.w[from + i][j])));
      }
    }
    if (norm == 0.0) {
      const bool ok = row.op == CmpOp::kLe ? 0 <= rhs[r] : 0 >= rhs[r];
      if (!ok) return SubLp{};
      continue;
    }
    LpRow lr;
    lr.coeffs.assign(nvars, 0.0);
    for (std::size_t i = 0; i < sub; ++i) {
      for (int j = ranges[i].first; j < ranges[i].second; ++j) {
        lr.coeffs[offsets[i] + (j - ranges[i].first)] =
            static_cast<double>(row.w[from + i][j]) / norm;
      }
    }
    lr.type = row.op == CmpOp::kLe ? LpRowType::kLe : LpRowType::kGe;
    lr.rhs = static_cast<double>(rhs[r]) / norm;
    lp_rows.push_back(std::move(lr));
  }
  const LpSolution lp = solve_lp_min(c, lp_rows);
  lp_iterations += lp.iterations;
  if (lp.status != LpStatus::kOptimal) return SubLp{};
  SubLp result;
  result.feasible = true;
  result.objective = lp.objective;
  result.x.resize(sub);
  for (std::size_t i = 0; i < sub; ++i) {
    result.x[i].assign(lp.x.begin() + offsets[i],
                       lp.x.begin() + offsets[i] +
                           (ranges[i].second - ranges[i].first));
  }
  return result;
}

// Exact branch-and-bound over the multiple-choice structure. Phase A finds
// the optimal value with best-bound search; a lexicographic reconstruction
// pass then produces the smallest optimal threshold tuple, matching the
// brute-force oracle's tie-break.
class BnbEngine {
 public:
  BnbEngine(const Core& core, const SolveOptions& options, SolverStats& stats)
      : core_(core), options_(options), stats_(stats), k_(core.num_groups()) {
    sizes_.resize(k_);
    for (std::size_t g = 0; g < k_; ++g) sizes_[g] = core.group_size(g);
    base_rhs_.reserve(core_.rows.size());
    for (const auto& row : core_.rows) base_rhs_.push_back(row.rhs);
    build_extremes();
  }

  // nullopt = proven infeasible.
  std::optional<std::vector<int>> run() {
    std::optional<std::vector<int>> incumbent;
    TotalObj inc_val;
    if (options_.enable_initial_incumbent) {
      incumbent = dive();
      if (!incumbent) return std::nullopt;  // the dive search is complete
      inc_val = value_of(*incumbent);
    }

    std::map<std::pair<double, std::int64_t>, OpenNode> open;
    std::int64_t seq = 0;
    {
      std::vector<std::pair<int, int>> full(k_);
      for (std::size_t g = 0; g < k_; ++g) full[g] = {0, sizes_[g]};
      push_node(open, seq, std::move(full));
    }
    while (!open.empty()) {
      auto it = open.begin();
      const double bound = it->first.first;
      OpenNode node = std::move(it->second);
      open.erase(it);
      if (incumbent && bound > inc_val.d + core_.eps) break;
      if (auto tuple = integral_tuple(node.ranges, node.x)) {
        if (rows_satisfied(0, *tuple, base_rhs_)) {
          const TotalObj v = value_of(*tuple);
          if (!incumbent || cmp_total(core_, v, inc_val) < 0) {
            incumbent = std::move(tuple);
            inc_val = v;
          }
          continue;
        }
        // LP noise produced a near-integral point that is not exactly
        // feasible; fall through and keep splitting.
      }
      const auto split = branch_point(node.ranges, node.x);
      if (!split) continue;  // single tuple, already handled above
      const auto [bg, mid] = *split;
      auto left = node.ranges;
      auto right = node.ranges;
      left[bg].second = mid + 1;
      right[bg].first = mid + 1;
      push_node(open, seq, std::move(left));
      push_node(open, seq, std::move(right));
    }
    if (!incumbent) return std::nullopt;
    inc_val = value_of(*incumbent);

    if (core_.exact && core_.unit <= 2 * core_.eps) {
      // Objective steps are below the LP bound safety margin, so closing on
      // integral LP optima could in principle hide a strictly better tuple.
      // Keep demanding an exact one-step improvement until none exists.
      for (;;) {
        TotalObj target{inc_val.d - core_.unit, inc_val.i - 1};
        auto better = query(0, base_rhs_, TotalObj{}, target);
        if (!better) break;
        incumbent = std::move(better);
        inc_val = value_of(*incumbent);
      }
    }
    return lex_reconstruct(inc_val, std::move(*incumbent));
  }

  TotalObj value_of(const std::vector<int>& tuple) const {
    TotalObj t;
    for (std::size_t g = 0; g < k_; ++g) add_candidate(core_, t, g, tuple[g]);
    return t;
  }

 private:
  struct OpenNode {
    std::vector<std::pair<int, int>> ranges;
    std::vector<std::vector<double>> x;
  };

  void charge() {
    if (++stats_.nodes > options_.node_limit) {
      throw ResourceLimitError(
          "node limit of " + std::to_string(options_.node_limit) +
          " exceeded before the solve finished; raise the node limit");
    }
  }

  void build_extremes() {
    const std::size_t r = core_.rows.size();
    suffix_min_.assign(r, std::vector<std::int64_t>(k_ + 1, 0));
    suffix_max_.assign(r, std::vector<std::int64_t>(k_ + 1, 0));
    for (std::size_t row = 0; row < r; ++row) {
      for (std::size_t g = k_; g-- > 0;) {
        std::int64_t lo = core_.rows[row].w[g][0];
        std::int64_t hi = lo;
        for (const std::int64_t w : core_.rows[row].w[g]) {
          lo = std::min(lo, w);
          hi = std::max(hi, w);
        }
        suffix_min_[row][g] = suffix_min_[row][g + 1] + lo;
        suffix_max_[row][g] = suffix_max_[row][g + 1] + hi;
      }
    }
  }

  // Depth-first dive for an initial incumbent: per group, try candidates in
  // objective order and keep a pick only if every coupling row can still be
  // satisfied by the remaining groups' extremes. The first descent is the
  // greedy rounding; backtracking is the fallback. Exhausting the tree
  // proves infeasibility because the pruning rule is sound.
  std::optional<std::vector<int>> dive() {
    std::vector<std::vector<int>> order(k_);
    for (std::size_t g = 0; g < k_; ++g) {
      order[g].resize(sizes_[g]);
      for (int c = 0; c < sizes_[g]; ++c) order[g][c] = c;
      std::sort(order[g].begin(), order[g].end(), [&](int a, int b) {
        if (core_.exact && core_.obj_i[g][a] != core_.obj_i[g][b]) {
          return core_.obj_i[g][a] < core_.obj_i[g][b];
        }
        if (core_.obj[g][a] != core_.obj[g][b]) {
          return core_.obj[g][a] < core_.obj[g][b];
        }
        return a < b;
      });
    }
    std::vector<int> tuple(k_, -1);
    std::vector<std::int64_t> sums(core_.rows.size(), 0);
    if (dive_rec(0, order, sums, tuple)) return tuple;
    return std::nullopt;
  }

  bool dive_rec(std::size_t g, const std::vector<std::vector<int>>& order,
                std::vector<std::int64_t>& sums, std::vector<int>& tuple) {
    charge();
    if (g == k_) return true;
    for (const int c : order[g]) {
      bool ok = true;
      for (std::size_t r = 0; r < core_.rows.size(); ++r) {
        const std::int64_t w = core_.rows[r].w[g][c];
        if (core_.rows[r].op == CmpOp::kLe) {
          ok = sums[r] + w + suffix_min_[r][g + 1] <= base_rhs_[r];
        } else {
          ok = sums[r] + w + suffix_max_[r][g + 1] >= base_rhs_[r];
        }
        if (!ok) break;
      }
      if (!ok) continue;
      tuple[g] = c;
      for (std::size_t r = 0; r < core_.rows.size(); ++r) {
        sums[r] += core_.rows[r].w[g][c];
      }
      if (dive_rec(g + 1, order, sums, tuple)) return true;
      for (std::size_t r = 0; r < core_.rows.size(); ++r) {
        sums[r] -= core_.rows[r].w[g][c];
      }
    }
    return false;
  }

  void push_node(std::map<std::pair<double, std::int64_t>, OpenNode>& open,
                 std::int64_t& seq,
                 std::vector<std::pair<int, int>> ranges) {
    charge();
    const SubLp lp =
        solve_group_lp(core_, 0, ranges, base_rhs_, stats_.lp_iterations);
    if (!lp.feasible) return;
    open.emplace(std::make_pair(lp.objective, seq++),
                 OpenNode{std::move(ranges), std::move(lp.x)});
  }

  static std::optional<std::vector<int>> integral_tuple(
      const std::vector<std::pair<int, int>>& ranges,
      const std::vector<std::vector<double>>& x) {
    std::vector<int> tuple(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      int arg = -1;
      double best = -1.0;
      for (std::size_t j = 0; j < x[i].size(); ++j) {
        if (x[i][j] > best) {
          best = x[i][j];
          arg = static_cast<int>(j);
        }
      }
      if (best < 1.0 - 1e-6) return std::nullopt;
      tuple[i] = ranges[i].first + arg;
    }
    return tuple;
  }

  // Group with the largest fractional mass (1 - max weight) among ranges of
  // width >= 2, split at the weighted median of its LP weights.
  static std::optional<std::pair<std::size_t, int>> branch_point(
      const std::vector<std::pair<int, int>>& ranges,
      const std::vector<std::vector<double>>& x) {
    std::size_t best_group = ranges.size();
    double best_mass = -1.0;
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      if (ranges[i].second - ranges[i].first < 2) continue;
      double max_w = 0.0, total = 0.0;
      for (const double w : x[i]) {
        max_w = std::max(max_w, w);
        total += w;
      }
      const double mass = total - max_w;
      if (mass > best_mass) {
        best_mass = mass;
        best_group = i;
      }
    }
    if (best_group == ranges.size()) return std::nullopt;
    const auto [lo, hi] = ranges[best_group];
    double total = 0.0;
    for (const double w : x[best_group]) total += w;
    double cum = 0.0;
    int mid = lo;
    for (int j = lo; j < hi; ++j) {
      cum += x[best_group][j - lo];
      if (cum >= total / 2) {
        mid = j;
        break;
      }
    }
    if (mid >= hi - 1) mid = hi - 2;
    return std::make_pair(best_group, mid);
  }

  bool rows_satisfied(std::size_t from, const std::vector<int>& sub,
                      const std::vector<std::int64_t>& rhs) const {
    for (std::size_t r = 0; r < core_.rows.size(); ++r) {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < sub.size(); ++i) {
        s += core_.rows[r].w[from + i][sub[i]];
      }
      const bool ok = core_.rows[r].op == CmpOp::kLe ? s <= rhs[r] : s >= rhs[r];
      if (!ok) return false;
    }
    return true;
  }

  // Is there a completion of groups [from, K) whose combined objective stays
  // at or below `target` under the residual bounds? Returns the first such
  // completion found, preferring low indices.
  std::optional<std::vector<int>> query(std::size_t from,
                                        const std::vector<std::int64_t>& rhs,
                                        const TotalObj& prefix,
                                        const TotalObj& target) {
    if (from == k_) {
      for (std::size_t r = 0; r < core_.rows.size(); ++r) {
        const bool ok = core_.rows[r].op == CmpOp::kLe ? 0 <= rhs[r] : 0 >= rhs[r];
        if (!ok) return std::nullopt;
      }
      const bool accept = core_.exact ? prefix.i <= target.i
                                      : prefix.d <= target.d + kTieTol;
      if (accept) return std::vector<int>{};
      return std::nullopt;
    }
    const std::size_t sub = k_ - from;
    std::vector<std::vector<std::pair<int, int>>> stack;
    {
      std::vector<std::pair<int, int>> full(sub);
      for (std::size_t i = 0; i < sub; ++i) full[i] = {0, sizes_[from + i]};
      stack.push_back(std::move(full));
    }
    while (!stack.empty()) {
      auto ranges = std::move(stack.back());
      stack.pop_back();
      charge();
      const SubLp lp =
          solve_group_lp(core_, from, ranges, rhs, stats_.lp_iterations);
      if (!lp.feasible) continue;
      if (prefix.d + lp.objective > target.d + kTieTol + core_.eps) continue;
      if (auto tuple = integral_tuple(ranges, lp.x)) {
        if (rows_satisfied(from, *tuple, rhs)) {
          TotalObj total = prefix;
          for (std::size_t i = 0; i < sub; ++i) {
            add_candidate(core_, total, from + i, (*tuple)[i]);
          }
          const bool accept = core_.exact ? total.i <= target.i
                                          : total.d <= target.d + kTieTol;
          if (accept) return tuple;
        }
      }
      const auto split = branch_point(ranges, lp.x);
      if (!split) continue;
      const auto [bg, mid] = *split;
      auto left = ranges;
      auto right = std::move(ranges);
      left[bg].second = mid + 1;
      right[bg].first = mid + 1;
      stack.push_back(std::move(right));
      stack.push_back(std::move(left));  // explore low indices first
    }
    return std::nullopt;
  }

  // Fixes groups left to right at the smallest candidate index that still
  // admits a completion achieving the optimal value. Groups are in subspace
  // order and candidates in threshold order, so the result is the
  // lexicographically smallest optimal threshold tuple.
  std::vector<int> lex_reconstruct(const TotalObj& vstar,
                                   std::vector<int> fallback) {
    std::vector<int> result;
    result.reserve(k_);
    std::vector<std::int64_t> rhs = base_rhs_;
    TotalObj prefix;
    for (std::size_t g = 0; g < k_; ++g) {
      bool found = false;
      for (int c = 0; c < sizes_[g]; ++c) {
        TotalObj next = prefix;
        add_candidate(core_, next, g, c);
        std::vector<std::int64_t> next_rhs = rhs;
        for (std::size_t r = 0; r < core_.rows.size(); ++r) {
          next_rhs[r] -= core_.rows[r].w[g][c];
        }
        if (query(g + 1, next_rhs, next, vstar)) {
          result.push_back(c);
          prefix = next;
          rhs = std::move(next_rhs);
          found = true;
          break;
        }
      }
      if (!found) {
        // Only reachable through float-tolerance edge cases; the phase-A
        // witness is still an optimal tuple.
        log_line(LogLevel::kDebug, "lex reconstruction fell back");
        return fallback;
      }
    }
    return result;
  }

  const Core& core_;
  const SolveOptions& options_;
  SolverStats& stats_;
  std::size_t k_;
  std::vector<int> sizes_;
  std::vector<std::int64_t> base_rhs_;
  std::vector<std::vector<std::int64_t>> suffix_min_;  // [row][group..K]
  std::vector<std::vector<std::int64_t>> suffix_max_;
};

inline std::pair<std::string, std::string> coupling_failure(
    const SelectionProblem& problem) {
  std::string names;
  for (const auto& spec : problem.constraints) {
    if (spec.scope != Scope::kGlobal) continue;
    if (!names.empty()) names += "; ";
    names += spec.describe();
  }
  if (names.empty()) names = "global constraints";
  return {names, "no threshold tuple satisfies the coupling constraints (" +
                     names + ")"};
}

[[noreturn]] inline void throw_coupling_infeasible(
    const SelectionProblem& problem) {
  auto [names, message] = coupling_failure(problem);
  throw InfeasibleError(InfeasibleCause::kCoupling, "", names, message);
}

// Multiple-choice knapsack over an integral budget row: exact suffix DP plus
// a forward pass that reconstructs the lexicographically smallest optimum.
template <typename V>
std::vector<int> knapsack_dp(const Core& core, std::int64_t budget) {
  const std::size_t k = core.num_groups();
  const ScaledRow& row = core.rows[0];
  const V inf = std::numeric_limits<V>::max();
  const auto value = [&](std::size_t g, int c) -> V {
    if constexpr (std::is_same_v<V, std::int64_t>) {
      return core.obj_i[g][c];
    } else {
      return core.obj[g][c];
    }
  };
  std::vector<std::vector<V>> suffix(k + 1,
                                     std::vector<V>(budget + 1, V(0)));
  for (std::size_t g = k; g-- > 0;) {
    for (std::int64_t cap = 0; cap <= budget; ++cap) {
      V best = inf;
      for (int c = 0; c < core.group_size(g); ++c) {
        const std::int64_t w = row.w[g][c];
        if (w > cap) continue;
        const V rest = suffix[g + 1][cap - w];
        if (rest == inf) continue;
        const V v = value(g, c) + rest;
        if (best == inf || v < best) best = v;
      }
      suffix[g][cap] = best;
    }
  }
  if (suffix[0][budget] == inf) {
    throw_coupling_infeasible(*core.problem);
  }
  std::vector<int> tuple;
  tuple.reserve(k);
  std::int64_t cap = budget;
  V target = suffix[0][budget];
  for (std::size_t g = 0; g < k; ++g) {
    bool found = false;
    for (int c = 0; c < core.group_size(g); ++c) {
      const std::int64_t w = row.w[g][c];
      if (w > cap) continue;
      const V rest = suffix[g + 1][cap - w];
      if (rest == inf) continue;
      const V v = value(g, c) + rest;
      bool attains;
      if constexpr (std::is_same_v<V, std::int64_t>) {
        attains = v == target;
      } else {
        attains = std::fabs(v - target) <= kTieTol;
      }
      if (attains) {
        tuple.push_back(c);
        cap -= w;
        target = rest;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::logic_error("knapsack reconstruction failed");
    }
  }
  return tuple;
}

// nullopt = the fast path does not apply.
inline std::optional<std::vector<int>> try_knapsack_dp(
    const Core& core, const SolveOptions& options) {
  if (!options.enable_knapsack_dp || core.rows.size() != 1) {
    return std::nullopt;
  }
  const ScaledRow& row = core.rows[0];
  if (row.op != CmpOp::kLe || !row.integral) return std::nullopt;
  std::int64_t cap_sum = 0;
  std::int64_t min_sum = 0;
  for (const auto& group : row.w) {
    std::int64_t lo = group[0], hi = group[0];
    for (const std::int64_t w : group) {
      if (w < 0) return std::nullopt;
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    cap_sum += hi;
    min_sum += lo;
  }
  if (row.rhs < 0 || min_sum > row.rhs) {
    throw_coupling_infeasible(*core.problem);
  }
  const std::int64_t budget = std::min(row.rhs, cap_sum);
  if (budget > options.dp_budget_limit) return std::nullopt;
  if (core.exact) {
    return knapsack_dp<std::int64_t>(core, budget);
  }
  return knapsack_dp<double>(core, budget);
}

inline Solution assemble_solution(const SelectionProblem& problem,
                                  const std::vector<int>& tuple,
                                  Certificate certificate,
                                  SolverStats stats) {
  Solution sol;
  sol.certificate = certificate;
  bool exact = true;
  Rat exact_sum(0);
  for (std::size_t g = 0; g < problem.groups.size(); ++g) {
    const Group& group = problem.groups[g];
    const Candidate& cand = group.candidates[tuple[g]];
    sol.chosen.push_back(Chosen{group.subspace,
                                static_cast<std::size_t>(tuple[g]), cand.row});
    sol.objective_value += cand.objective;
    if (cand.objective_exact) {
      exact_sum += *cand.objective_exact;
    } else {
      exact = false;
    }
  }
  if (exact) sol.objective_exact = exact_sum;
  sol.stats = std::move(stats);
  validate_selection(problem, sol.chosen);
  return sol;
}

}  // namespace solver_detail

/// LP relaxation of the assembled problem over full candidate ranges.
inline LpRelaxationResult solve_relaxation(const SelectionProblem& problem) {
  solver_detail::Core core = solver_detail::build_core(problem);
  std::vector<std::pair<int, int>> full(core.num_groups());
  for (std::size_t g = 0; g < core.num_groups(); ++g) {
    full[g] = {0, core.group_size(g)};
  }
  std::vector<std::int64_t> rhs;
  for (const auto& row : core.rows) rhs.push_back(row.rhs);
  LpRelaxationResult result;
  const solver_detail::SubLp lp =
      solver_detail::solve_group_lp(core, 0, full, rhs, result.iterations);
  result.feasible = lp.feasible;
  if (lp.feasible) {
    result.bound = core.maximize ? -lp.objective : lp.objective;
    result.weights = lp.x;
  }
  return result;
}

/// Exactly solves the selection problem. Deterministic; ties on the objective
/// are broken toward the lexicographically smallest threshold tuple. The
/// returned certificate is proved-optimal.
inline Solution solve(const SelectionProblem& problem,
                      const SolveOptions& options = SolveOptions()) {
  namespace sd = solver_detail;
  const auto start = std::chrono::steady_clock::now();
  if (problem.groups.empty()) {
    throw ValidationError("problem has no groups");
  }
  const sd::Core core = sd::build_core(problem);
  SolverStats stats;
  std::optional<std::vector<int>> tuple = sd::try_knapsack_dp(core, options);
  if (tuple) {
    stats.method = "knapsack-dp";
  } else {
    stats.method = "branch-and-bound";
    sd::BnbEngine engine(core, options, stats);
    tuple = engine.run();
    if (!tuple) {
      sd::throw_coupling_infeasible(problem);
    }
  }
  Solution sol = sd::assemble_solution(problem, *tuple,
                                       Certificate::kProvedOptimal, stats);
  sol.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (log_enabled(LogLevel::kInfo)) {
    log_line(LogLevel::kInfo,
             "solve: method=" + sol.stats.method +
                 " nodes=" + std::to_string(sol.stats.nodes) +
                 " lp_iterations=" + std::to_string(sol.stats.lp_iterations) +
                 " wall_seconds=" + std::to_string(sol.stats.wall_seconds));
  }
  return sol;
}

/// Exhaustive oracle: enumerates every tuple in lexicographic order, checking
/// the coupling rows in exact integer arithmetic. Shares only the objective
/// comparison semantics (exact where rational, 1e-12 tolerance otherwise,
/// then smallest tuple) with solve().
inline Solution solve_bruteforce(const SelectionProblem& problem,
                                 std::int64_t tuple_limit = 10'000'000) {
  namespace sd = solver_detail;
  const auto start = std::chrono::steady_clock::now();
  if (problem.groups.empty()) {
    throw ValidationError("problem has no groups");
  }
  const sd::Core core = sd::build_core(problem);
  const std::size_t k = core.num_groups();
  BigInt product = 1;
  for (std::size_t g = 0; g < k; ++g) product *= core.group_size(g);
  if (product > tuple_limit) {
    throw ResourceLimitError("tuple enumeration of " + product.str() +
                             " combinations exceeds the limit of " +
                             std::to_string(tuple_limit));
  }

  SolverStats stats;
  stats.method = "bruteforce";
  std::vector<int> current(k, 0);
  std::vector<int> best;
  sd::TotalObj best_val;
  std::vector<std::int64_t> sums(core.rows.size(), 0);
  std::vector<sd::TotalObj> prefix(k + 1);

  const auto rec = [&](auto&& self, std::size_t g) -> void {
    if (g == k) {
      ++stats.nodes;
      for (std::size_t r = 0; r < core.rows.size(); ++r) {
        const bool ok = core.rows[r].op == CmpOp::kLe
                            ? sums[r] <= core.rows[r].rhs
                            : sums[r] >= core.rows[r].rhs;
        if (!ok) return;
      }
      if (best.empty() || sd::cmp_total(core, prefix[k], best_val) < 0) {
        best = current;
        best_val = prefix[k];
      }
      return;
    }
    for (int c = 0; c < core.group_size(g); ++c) {
      current[g] = c;
      prefix[g + 1] = prefix[g];
      sd::add_candidate(core, prefix[g + 1], g, c);
      for (std::size_t r = 0; r < core.rows.size(); ++r) {
        sums[r] += core.rows[r].w[g][c];
      }
      self(self, g + 1);
      for (std::size_t r = 0; r < core.rows.size(); ++r) {
        sums[r] -= core.rows[r].w[g][c];
      }
    }
  };
  rec(rec, 0);

  if (best.empty()) {
    sd::throw_coupling_infeasible(problem);
  }
  Solution sol = sd::assemble_solution(problem, best,
                                       Certificate::kOracleVerified, stats);
  sol.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return sol;
}

}  // namespace otlp
