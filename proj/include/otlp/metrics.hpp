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
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "otlp/error.hpp"
#include "otlp/rational.hpp"
#include "otlp/types.hpp"

namespace otlp {

enum class Metric {
  kTp,
  kFp,
  kTn,
  kFn,
  kPredictedPositive,
  kPrecision,
  kRecall,
  kFBeta,
  kAccuracy,
  kKappa,
  kMcc,
  kGMean,
  kTpCost,
  kFpCost,
  kTnCost,
  kFnCost,
  kTotalCost,
};

/// A confusion-derived quantity evaluable on one ThresholdRow. FBeta carries
/// its beta; TotalCost carries the four cell weights (tp, fp, tn, fn order).
struct MetricKind {
  Metric id = Metric::kTp;
  Rat beta = Rat(1);
  std::array<Rat, 4> weights{};

  static MetricKind simple(Metric id) {
    MetricKind m;
    m.id = id;
    return m;
  }
  static MetricKind fbeta(const Rat& beta) {
    if (!(beta > 0)) throw ValidationError("fbeta requires beta > 0");
    MetricKind m;
    m.id = Metric::kFBeta;
    m.beta = beta;
    return m;
  }
  static MetricKind total_cost(const std::array<Rat, 4>& weights) {
    MetricKind m;
    m.id = Metric::kTotalCost;
    m.weights = weights;
    return m;
  }

  bool needs_cost() const {
    switch (id) {
      case Metric::kTpCost:
      case Metric::kFpCost:
      case Metric::kTnCost:
      case Metric::kFnCost:
      case Metric::kTotalCost:
        return true;
      default:
        return false;
    }
  }

  /// Integer-valued per row: usable as knapsack weights.
  bool is_count() const {
    switch (id) {
      case Metric::kTp:
      case Metric::kFp:
      case Metric::kTn:
      case Metric::kFn:
      case Metric::kPredictedPositive:
        return true;
      default:
        return false;
    }
  }

  /// Rational-valued per row: exact objective coefficients are available.
  bool is_exact_valued() const { return is_count() || needs_cost(); }

  std::string name() const;
  static MetricKind parse(std::string_view name);
};

inline std::string MetricKind::name() const {
  switch (id) {
    case Metric::kTp:
      return "tp";
    case Metric::kFp:
      return "fp";
    case Metric::kTn:
      return "tn";
    case Metric::kFn:
      return "fn";
    case Metric::kPredictedPositive:
      return "predicted_positive";
    case Metric::kPrecision:
      return "precision";
    case Metric::kRecall:
      return "recall";
    case Metric::kFBeta:
      if (beta == 1) return "f1";
      if (beta == 2) return "f2";
      return "fbeta:" + rat_string(beta);
    case Metric::kAccuracy:
      return "accuracy";
    case Metric::kKappa:
      return "kappa";
    case Metric::kMcc:
      return "mcc";
    case Metric::kGMean:
      return "g_mean";
    case Metric::kTpCost:
      return "tp_cost";
    case Metric::kFpCost:
      return "fp_cost";
    case Metric::kTnCost:
      return "tn_cost";
    case Metric::kFnCost:
      return "fn_cost";
    case Metric::kTotalCost:
      return "total_cost:" + rat_string(weights[0]) + "," +
             rat_string(weights[1]) + "," + rat_string(weights[2]) + "," +
             rat_string(weights[3]);
  }
  return "?";
}

inline MetricKind MetricKind::parse(std::string_view name) {
  if (name == "tp") return simple(Metric::kTp);
  if (name == "fp") return simple(Metric::kFp);
  if (name == "tn") return simple(Metric::kTn);
  if (name == "fn") return simple(Metric::kFn);
  if (name == "predicted_positive") return simple(Metric::kPredictedPositive);
  if (name == "precision") return simple(Metric::kPrecision);
  if (name == "recall") return simple(Metric::kRecall);
  if (name == "f1") return fbeta(Rat(1));
  if (name == "f2") return fbeta(Rat(2));
  if (name == "accuracy") return simple(Metric::kAccuracy);
  if (name == "kappa") return simple(Metric::kKappa);
  if (name == "mcc") return simple(Metric::kMcc);
  if (name == "g_mean") return simple(Metric::kGMean);
  if (name == "tp_cost") return simple(Metric::kTpCost);
  if (name == "fp_cost") return simple(Metric::kFpCost);
  if (name == "tn_cost") return simple(Metric::kTnCost);
  if (name == "fn_cost") return simple(Metric::kFnCost);
  if (name.substr(0, 6) == "fbeta:") {
    return fbeta(parse_decimal(name.substr(6)));
  }
  if (name.substr(0, 11) == "total_cost:") {
    std::string_view rest = name.substr(11);
    std::array<Rat, 4> w;
    for (int i = 0; i < 4; ++i) {
      const std::size_t comma = rest.find(',');
      if ((i < 3) != (comma != std::string_view::npos)) {
        throw ValidationError("total_cost needs four comma-separated weights");
      }
      w[i] = parse_decimal(rest.substr(0, comma));
      if (comma != std::string_view::npos) rest = rest.substr(comma + 1);
    }
    return total_cost(w);
  }
  throw ValidationError(
      "unknown metric '" + std::string(name) +
      "' (expected one of: tp, fp, tn, fn, predicted_positive, precision, "
      "recall, f1, f2, fbeta:<beta>, accuracy, kappa, mcc, g_mean, tp_cost, "
      "fp_cost, tn_cost, fn_cost, total_cost:<w1,w2,w3,w4>)");
}

/// Evaluation result. Ratios with a zero denominator (and kappa/mcc with a
/// degenerate marginal) evaluate to 0 and are flagged undefined; constraints
/// referencing an undefined value treat the row as violating.
struct MetricValue {
  double value = 0.0;
  bool defined = true;
};

namespace metric_detail {

inline MetricValue undefined() { return MetricValue{0.0, false}; }

inline MetricValue ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return undefined();
  return MetricValue{static_cast<double>(num) / static_cast<double>(den),
                     true};
}

}  // namespace metric_detail

inline MetricValue evaluate_ex(const ThresholdRow& row,
                               const MetricKind& kind) {
  using metric_detail::ratio;
  using metric_detail::undefined;
  const std::int64_t tp = row.tp, fp = row.fp, tn = row.tn, fn = row.fn;
  const std::int64_t n = tp + fp + tn + fn;
  switch (kind.id) {
    case Metric::kTp:
      return {static_cast<double>(tp), true};
    case Metric::kFp:
      return {static_cast<double>(fp), true};
    case Metric::kTn:
      return {static_cast<double>(tn), true};
    case Metric::kFn:
      return {static_cast<double>(fn), true};
    case Metric::kPredictedPositive:
      return {static_cast<double>(tp + fp), true};
    case Metric::kPrecision:
      return ratio(tp, tp + fp);
    case Metric::kRecall:
      return ratio(tp, tp + fn);
    case Metric::kFBeta: {
      // (1+b^2) P R / (b^2 P + R) reduces to (1+b^2) tp / ((1+b^2) tp + b^2 fn
      // + fp); the denominator b^2 P + R is zero exactly when tp == 0.
      if (tp == 0) return undefined();
      const double b2 = to_double(kind.beta) * to_double(kind.beta);
      const double num = (1.0 + b2) * static_cast<double>(tp);
      return {num / (num + b2 * static_cast<double>(fn) +
                     static_cast<double>(fp)),
              true};
    }
    case Metric::kAccuracy:
      return ratio(tp + tn, n);
    case Metric::kKappa: {
      if (n == 0) return undefined();
      const BigInt big_n = n;
      const BigInt pe_num =
          BigInt(tp + fp) * BigInt(tp + fn) + BigInt(fn + tn) * BigInt(fp + tn);
      const BigInt den = big_n * big_n - pe_num;
      if (den == 0) return undefined();
      const BigInt num = BigInt(tp + tn) * big_n - pe_num;
      return {to_double(Rat(num, den)), true};
    }
    case Metric::kMcc: {
      if (tp + fp == 0 || tp + fn == 0 || tn + fp == 0 || tn + fn == 0) {
        return undefined();
      }
      const double s = static_cast<double>(BigInt(tp) * tn - BigInt(fp) * fn);
      const double d = static_cast<double>(tp + fp) *
                       static_cast<double>(tp + fn) *
                       static_cast<double>(tn + fp) *
                       static_cast<double>(tn + fn);
      return {s / std::sqrt(d), true};
    }
    case Metric::kGMean: {
      if (tp + fn == 0 || tn + fp == 0) return undefined();
      const double recall =
          static_cast<double>(tp) / static_cast<double>(tp + fn);
      const double specificity =
          static_cast<double>(tn) / static_cast<double>(tn + fp);
      return {std::sqrt(recall * specificity), true};
    }
    case Metric::kTpCost:
      return {to_double(row.tp_cost), true};
    case Metric::kFpCost:
      return {to_double(row.fp_cost), true};
    case Metric::kTnCost:
      return {to_double(row.tn_cost), true};
    case Metric::kFnCost:
      return {to_double(row.fn_cost), true};
    case Metric::kTotalCost: {
      const Rat total = kind.weights[0] * row.tp_cost +
                        kind.weights[1] * row.fp_cost +
                        kind.weights[2] * row.tn_cost +
                        kind.weights[3] * row.fn_cost;
      return {to_double(total), true};
    }
  }
  return undefined();
}

inline double evaluate(const ThresholdRow& row, const MetricKind& kind) {
  return evaluate_ex(row, kind).value;
}

/// Exact rational value for count- and cost-valued metrics; nullopt for ratio
/// metrics (those are compared with a float tolerance by the solver).
inline std::optional<Rat> evaluate_exact(const ThresholdRow& row,
                                         const MetricKind& kind) {
  switch (kind.id) {
    case Metric::kTp:
      return Rat(row.tp);
    case Metric::kFp:
      return Rat(row.fp);
    case Metric::kTn:
      return Rat(row.tn);
    case Metric::kFn:
      return Rat(row.fn);
    case Metric::kPredictedPositive:
      return Rat(row.tp + row.fp);
    case Metric::kTpCost:
      return row.tp_cost;
    case Metric::kFpCost:
      return row.fp_cost;
    case Metric::kTnCost:
      return row.tn_cost;
    case Metric::kFnCost:
      return row.fn_cost;
    case Metric::kTotalCost:
      return kind.weights[0] * row.tp_cost + kind.weights[1] * row.fp_cost +
             kind.weights[2] * row.tn_cost + kind.weights[3] * row.fn_cost;
    default:
      return std::nullopt;
  }
}

/// A sensitivity table with extra metric columns, in request order.
struct AnnotatedTable {
  SensitivityTable table;
  std::vector<MetricKind> kinds;
  std::vector<std::vector<double>> columns;  // columns[k][row]
};

inline AnnotatedTable annotate(const SensitivityTable& table,
                               const std::vector<MetricKind>& kinds) {
  for (const auto& kind : kinds) {
    if (kind.needs_cost() && !table.has_cost) {
      throw MissingCostError("metric '" + kind.name() +
                             "' requires cost data, but none was ingested");
    }
  }
  AnnotatedTable out;
  out.table = table;
  out.kinds = kinds;
  out.columns.resize(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    out.columns[k].reserve(table.rows.size());
    for (const auto& row : table.rows) {
      out.columns[k].push_back(evaluate(row, kinds[k]));
    }
  }
  return out;
}

}  // namespace otlp
