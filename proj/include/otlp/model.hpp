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
#include <utility>
#include <vector>

#include "otlp/error.hpp"
#include "otlp/metrics.hpp"
#include "otlp/rational.hpp"
#include "otlp/types.hpp"

namespace otlp {

enum class Scope { kLocal, kGlobal };
enum class CmpOp { kLe, kGe };
enum class Direction { kMinimize, kMaximize };

inline std::string_view op_string(CmpOp op) {
  return op == CmpOp::kLe ? "<=" : ">=";
}

struct ObjectiveSpec {
  MetricKind metric;
  Direction direction = Direction::kMinimize;
};

/// One declarative constraint. Local constraints restrict rows within a
/// subspace (all subspaces when no key is given); global constraints couple
/// the rows selected across subspaces.
struct ConstraintSpec {
  Scope scope = Scope::kLocal;
  std::optional<std::string> subspace;  // local only; absent = all subspaces
  MetricKind metric;
  CmpOp op = CmpOp::kLe;
  Rat bound;

  bool applies_to(const std::string& key) const {
    return scope == Scope::kLocal && (!subspace || *subspace == key);
  }

  std::string describe() const {
    std::string s = scope == Scope::kLocal ? "local" : "global";
    if (subspace) s += "(" + *subspace + ")";
    s += " " + metric.name() + " " + std::string(op_string(op)) + " " +
         rat_string(bound);
    return s;
  }
};

namespace feas_detail {

inline bool cmp(const Rat& value, CmpOp op, const Rat& bound) {
  return op == CmpOp::kLe ? value <= bound : value >= bound;
}

// lhs op bound * sqrt(d), with d >= 0 integer, decided exactly by squaring.
inline bool cmp_against_sqrt(const Rat& lhs, CmpOp op, const Rat& bound,
                             const BigInt& d) {
  const Rat rhs_sq = bound * bound * Rat(d);
  const bool bound_nonneg = bound >= 0;
  if (op == CmpOp::kGe) {
    if (!bound_nonneg) {
      return lhs >= 0 || lhs * lhs <= rhs_sq;
    }
    return lhs >= 0 && lhs * lhs >= rhs_sq;
  }
  if (bound_nonneg) {
    return lhs <= 0 || lhs * lhs <= rhs_sq;
  }
  return lhs <= 0 && lhs * lhs >= rhs_sq;
}

}  // namespace feas_detail

/// Exact feasibility of one row against `metric op bound`. Ratio comparisons
/// are cross-multiplied integer/rational comparisons; square-root-valued
/// metrics (mcc, g_mean) are decided by exact squaring. An undefined metric
/// value means the row violates the constraint regardless of direction.
inline bool row_satisfies(const ThresholdRow& row, const MetricKind& metric,
                          CmpOp op, const Rat& bound, bool has_cost) {
  using feas_detail::cmp;
  using feas_detail::cmp_against_sqrt;
  if (metric.needs_cost() && !has_cost) {
    throw MissingCostError("constraint on '" + metric.name() +
                           "' requires cost data, but none was ingested");
  }
  const std::int64_t tp = row.tp, fp = row.fp, tn = row.tn, fn = row.fn;
  const std::int64_t n = tp + fp + tn + fn;
  switch (metric.id) {
    case Metric::kTp:
      return cmp(Rat(tp), op, bound);
    case Metric::kFp:
      return cmp(Rat(fp), op, bound);
    case Metric::kTn:
      return cmp(Rat(tn), op, bound);
    case Metric::kFn:
      return cmp(Rat(fn), op, bound);
    case Metric::kPredictedPositive:
      return cmp(Rat(tp + fp), op, bound);
    case Metric::kPrecision:
      if (tp + fp == 0) return false;
      return cmp(Rat(tp, tp + fp), op, bound);
    case Metric::kRecall:
      if (tp + fn == 0) return false;
      return cmp(Rat(tp, tp + fn), op, bound);
    case Metric::kFBeta: {
      if (tp == 0) return false;
      const BigInt p = boost::multiprecision::numerator(metric.beta);
      const BigInt q = boost::multiprecision::denominator(metric.beta);
      const BigInt p2 = p * p, q2 = q * q;
      const BigInt num = (p2 + q2) * tp;
      const BigInt den = num + p2 * fn + q2 * fp;
      return cmp(Rat(num, den), op, bound);
    }
    case Metric::kAccuracy:
      if (n == 0) return false;
      return cmp(Rat(tp + tn, n), op, bound);
    case Metric::kKappa: {
      if (n == 0) return false;
      const BigInt big_n = n;
      const BigInt pe_num =
          BigInt(tp + fp) * BigInt(tp + fn) + BigInt(fn + tn) * BigInt(fp + tn);
      const BigInt den = big_n * big_n - pe_num;
      if (den == 0) return false;
      return cmp(Rat(BigInt(tp + tn) * big_n - pe_num, den), op, bound);
    }
    case Metric::kMcc: {
      if (tp + fp == 0 || tp + fn == 0 || tn + fp == 0 || tn + fn == 0) {
        return false;
      }
      const BigInt s = BigInt(tp) * tn - BigInt(fp) * fn;
      const BigInt d = BigInt(tp + fp) * BigInt(tp + fn) * BigInt(tn + fp) *
                       BigInt(tn + fn);
      return cmp_against_sqrt(Rat(s), op, bound, d);
    }
    case Metric::kGMean: {
      if (tp + fn == 0 || tn + fp == 0) return false;
      // g_mean >= 0 always; compare squares.
      const Rat square = Rat(tp, tp + fn) * Rat(tn, tn + fp);
      if (op == CmpOp::kGe) {
        return bound <= 0 || square >= bound * bound;
      }
      return bound >= 0 && square <= bound * bound;
    }
    case Metric::kTpCost:
      return cmp(row.tp_cost, op, bound);
    case Metric::kFpCost:
      return cmp(row.fp_cost, op, bound);
    case Metric::kTnCost:
      return cmp(row.tn_cost, op, bound);
    case Metric::kFnCost:
      return cmp(row.fn_cost, op, bound);
    case Metric::kTotalCost: {
      const Rat total =
          metric.weights[0] * row.tp_cost + metric.weights[1] * row.fp_cost +
          metric.weights[2] * row.tn_cost + metric.weights[3] * row.fn_cost;
      return cmp(total, op, bound);
    }
  }
  return false;
}

/// Indices of the rows of `table` satisfying every applicable local
/// constraint, in table order. Constraints are applied in list order; if the
/// surviving set becomes empty the error names the constraint that emptied it.
inline std::vector<std::size_t> filter_local(
    const SensitivityTable& table, const std::vector<ConstraintSpec>& specs) {
  std::vector<std::size_t> alive(table.rows.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
  for (const auto& spec : specs) {
    if (!spec.applies_to(table.subspace)) continue;
    std::vector<std::size_t> next;
    next.reserve(alive.size());
    for (const std::size_t i : alive) {
      if (row_satisfies(table.rows[i], spec.metric, spec.op, spec.bound,
                        table.has_cost)) {
        next.push_back(i);
      }
    }
    if (next.empty()) {
      throw InfeasibleError(
          InfeasibleCause::kLocalFilter, table.subspace, spec.describe(),
          "subspace '" + table.subspace +
              "' has no feasible threshold: binding constraint " +
              spec.describe());
    }
    alive = std::move(next);
  }
  return alive;
}

/// One candidate selection variable: a surviving row of one subspace.
struct Candidate {
  std::size_t row_index = 0;  // index into the source table's rows
  ThresholdRow row;
  double objective = 0.0;               // a_ij, in the objective's own sense
  std::optional<Rat> objective_exact;   // present for count/cost objectives
};

struct Group {
  std::string subspace;
  std::vector<Candidate> candidates;  // ascending threshold
  std::int64_t positive_count = 0;
  std::int64_t negative_count = 0;
};

/// A linear coupling row over all candidate variables:
///   sum coeffs[g][c] * x[g][c]  op  bound.
struct LinearConstraint {
  std::vector<std::vector<Rat>> coeffs;
  CmpOp op = CmpOp::kLe;
  Rat bound;
  ConstraintSpec source;
  // Companion row enforcing a ratio's denominator > 0 (undefined => violated).
  bool definedness_row = false;
};

/// The assembled multiple-choice 0-1 program: pick exactly one candidate per
/// group, minimizing/maximizing a separable objective subject to the coupling
/// rows. Local constraints have already been applied as pre-filters.
struct SelectionProblem {
  ObjectiveSpec objective;
  std::vector<Group> groups;                  // ascending subspace key
  std::vector<LinearConstraint> couplings;
  std::vector<ConstraintSpec> constraints;    // full provenance list
  bool has_cost = false;

  std::size_t variable_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.candidates.size();
    return n;
  }
};

/// Which metrics admit an exact linear coupling row. Ratio metrics beyond
/// precision/recall are nonlinear in summed counts and stay local-only.
inline bool global_scope_supported(const MetricKind& metric) {
  switch (metric.id) {
    case Metric::kTp:
    case Metric::kFp:
    case Metric::kTn:
    case Metric::kFn:
    case Metric::kPredictedPositive:
    case Metric::kTpCost:
    case Metric::kFpCost:
    case Metric::kTnCost:
    case Metric::kFnCost:
    case Metric::kTotalCost:
    case Metric::kPrecision:
    case Metric::kRecall:
      return true;
    default:
      return false;
  }
}

/// Linearizes one global constraint over the groups' candidates. Count and
/// cost metrics contribute their row value as the coefficient. A ratio bound
/// p on precision becomes sum(tp - p*(tp+fp)) op 0, plus a companion row
/// requiring at least one predicted positive so an undefined aggregate ratio
/// can never satisfy the constraint; recall is analogous over tp+fn.
inline std::vector<LinearConstraint> linearize_global(
    const ConstraintSpec& spec, const std::vector<Group>& groups) {
  if (spec.scope != Scope::kGlobal) {
    throw ValidationError("linearize_global requires a global constraint");
  }
  if (!global_scope_supported(spec.metric)) {
    throw ValidationError("metric '" + spec.metric.name() +
                          "' is not supported in global scope (counts, cost "
                          "aggregates, precision and recall only)");
  }
  const bool is_ratio = spec.metric.id == Metric::kPrecision ||
                        spec.metric.id == Metric::kRecall;
  LinearConstraint main;
  main.op = spec.op;
  main.source = spec;
  LinearConstraint defined;
  defined.op = CmpOp::kGe;
  defined.bound = Rat(1);
  defined.source = spec;
  defined.definedness_row = true;
  for (const auto& group : groups) {
    auto& main_coeffs = main.coeffs.emplace_back();
    auto& den_coeffs = defined.coeffs.emplace_back();
    for (const auto& cand : group.candidates) {
      const ThresholdRow& row = cand.row;
      if (is_ratio) {
        const std::int64_t denom = spec.metric.id == Metric::kPrecision
                                       ? row.tp + row.fp
                                       : row.tp + row.fn;
        main_coeffs.push_back(Rat(row.tp) - spec.bound * Rat(denom));
        den_coeffs.push_back(Rat(denom));
      } else {
        main_coeffs.push_back(*evaluate_exact(row, spec.metric));
      }
    }
  }
  if (is_ratio) {
    main.bound = Rat(0);
    // precision >= p  <=>  sum(tp - p(tp+fp)) >= 0; <= is mirrored.
    return {std::move(main), std::move(defined)};
  }
  main.bound = spec.bound;
  return {std::move(main)};
}

/// Assembles the selection problem: local constraints filter rows per
/// subspace, the objective coefficient of each surviving row is the metric
/// value on that row alone, and global constraints become coupling rows.
inline SelectionProblem build_problem(
    const SensitivityMap& tables, const ObjectiveSpec& objective,
    const std::vector<ConstraintSpec>& constraints) {
  if (tables.empty()) {
    throw ValidationError("no sensitivity tables");
  }
  bool all_have_cost = true;
  for (const auto& [key, table] : tables) {
    if (!table.has_cost) all_have_cost = false;
  }
  const auto require_cost = [&](const MetricKind& metric) {
    if (metric.needs_cost() && !all_have_cost) {
      throw MissingCostError("metric '" + metric.name() +
                             "' requires cost data, but none was ingested");
    }
  };
  require_cost(objective.metric);
  for (const auto& spec : constraints) {
    require_cost(spec.metric);
    if (spec.scope == Scope::kGlobal) {
      if (!global_scope_supported(spec.metric)) {
        throw ValidationError("metric '" + spec.metric.name() +
                              "' is not supported in global scope (counts, "
                              "cost aggregates, precision and recall only)");
      }
      if (spec.subspace) {
        throw ValidationError("global constraints cannot name a subspace");
      }
    } else if (spec.subspace && tables.find(*spec.subspace) == tables.end()) {
      throw ValidationError("constraint names unknown subspace '" +
                            *spec.subspace + "'");
    }
  }

  SelectionProblem problem;
  problem.objective = objective;
  problem.constraints = constraints;
  problem.has_cost = all_have_cost;
  for (const auto& [key, table] : tables) {
    Group group;
    group.subspace = key;
    group.positive_count = table.positive_count;
    group.negative_count = table.negative_count;
    for (const std::size_t i : filter_local(table, constraints)) {
      Candidate cand;
      cand.row_index = i;
      cand.row = table.rows[i];
      cand.objective = evaluate(cand.row, objective.metric);
      cand.objective_exact = evaluate_exact(cand.row, objective.metric);
      group.candidates.push_back(std::move(cand));
    }
    problem.groups.push_back(std::move(group));
  }
  for (const auto& spec : constraints) {
    if (spec.scope != Scope::kGlobal) continue;
    for (auto& lc : linearize_global(spec, problem.groups)) {
      problem.couplings.push_back(std::move(lc));
    }
  }
  return problem;
}

enum class Certificate { kProvedOptimal, kOracleVerified, kNone };

inline std::string_view certificate_string(Certificate c) {
  switch (c) {
    case Certificate::kProvedOptimal:
      return "proved-optimal";
    case Certificate::kOracleVerified:
      return "oracle-verified";
    case Certificate::kNone:
      return "none";
  }
  return "?";
}

struct Chosen {
  std::string subspace;
  std::size_t candidate_index = 0;  // into the group's candidate list
  ThresholdRow row;
};

struct SolverStats {
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
  double wall_seconds = 0.0;
  std::string method;
};

/// One chosen threshold per subspace. The objective value is reported in the
/// problem's own sense; objective_exact is present for count/cost objectives.
struct Solution {
  std::vector<Chosen> chosen;  // group order
  double objective_value = 0.0;
  std::optional<Rat> objective_exact;
  SolverStats stats;
  Certificate certificate = Certificate::kNone;
};

/// Audit of one ConstraintSpec against a concrete selection. `achieved` is
/// the binding (worst-slack) value for local constraints spanning several
/// subspaces, the pooled value for global ones.
struct ConstraintAudit {
  ConstraintSpec spec;
  double achieved = 0.0;
  bool defined = true;
  bool satisfied = false;
  double slack = 0.0;
  std::vector<std::pair<std::string, double>> per_subspace;  // locals only
};

/// Re-validates a selection against every original ConstraintSpec in exact
/// arithmetic — deliberately independent of the linearization.
inline std::vector<ConstraintAudit> audit_constraints(
    const SelectionProblem& problem, const std::vector<Chosen>& chosen) {
  std::vector<ConstraintAudit> audits;
  for (const auto& spec : problem.constraints) {
    ConstraintAudit audit;
    audit.spec = spec;
    const double bound_d = to_double(spec.bound);
    if (spec.scope == Scope::kLocal) {
      bool first = true;
      audit.satisfied = true;
      for (std::size_t g = 0; g < problem.groups.size(); ++g) {
        if (!spec.applies_to(problem.groups[g].subspace)) continue;
        const ThresholdRow& row = chosen[g].row;
        const MetricValue v = evaluate_ex(row, spec.metric);
        audit.per_subspace.emplace_back(problem.groups[g].subspace, v.value);
        audit.satisfied = audit.satisfied &&
                          row_satisfies(row, spec.metric, spec.op, spec.bound,
                                        problem.has_cost);
        const double slack = spec.op == CmpOp::kLe ? bound_d - v.value
                                                   : v.value - bound_d;
        if (first || slack < audit.slack || (!v.defined && audit.defined)) {
          audit.achieved = v.value;
          audit.slack = slack;
          audit.defined = v.defined;
          first = false;
        }
      }
    } else {
      // Pool counts and costs over the chosen rows, then compare directly.
      ThresholdRow pooled;
      pooled.tp_cost = pooled.fp_cost = pooled.tn_cost = pooled.fn_cost =
          Rat(0);
      for (const auto& c : chosen) {
        pooled.tp += c.row.tp;
        pooled.fp += c.row.fp;
        pooled.tn += c.row.tn;
        pooled.fn += c.row.fn;
        pooled.tp_cost += c.row.tp_cost;
        pooled.fp_cost += c.row.fp_cost;
        pooled.tn_cost += c.row.tn_cost;
        pooled.fn_cost += c.row.fn_cost;
      }
      const MetricValue v = evaluate_ex(pooled, spec.metric);
      audit.achieved = v.value;
      audit.defined = v.defined;
      audit.satisfied = row_satisfies(pooled, spec.metric, spec.op, spec.bound,
                                      problem.has_cost);
      audit.slack =
          spec.op == CmpOp::kLe ? bound_d - v.value : v.value - bound_d;
    }
    audits.push_back(std::move(audit));
  }
  return audits;
}

/// Bug trap: every solver result must pass the independent audit.
inline void validate_selection(const SelectionProblem& problem,
                               const std::vector<Chosen>& chosen) {
  for (const auto& audit : audit_constraints(problem, chosen)) {
    if (!audit.satisfied) {
      throw std::logic_error(
          "internal error: solver returned a selection violating " +
          audit.spec.describe());
    }
  }
}

}  // namespace otlp
