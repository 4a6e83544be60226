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

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "otlp/error.hpp"
#include "otlp/metrics.hpp"
#include "otlp/rational.hpp"
#include "otlp/types.hpp"

namespace otlp {

/// Shortest decimal rendering that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace csv_detail {

inline std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> split_line(const std::string& line,
                                           const std::string& source,
                                           std::size_t lineno) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) {
    throw ParseError(source, lineno, "unterminated quoted field");
  }
  fields.push_back(std::move(current));
  return fields;
}

inline double parse_double_field(const std::string& field,
                                 const std::string& source, std::size_t lineno,
                                 const std::string& what) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(source, lineno, "invalid " + what + " '" + field + "'");
  }
  return value;
}

inline std::int64_t parse_count_field(const std::string& field,
                                      const std::string& source,
                                      std::size_t lineno,
                                      const std::string& what) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || value < 0) {
    throw ParseError(source, lineno,
                     "invalid " + what + " '" + field +
                         "' (expected a non-negative integer)");
  }
  return value;
}

// Reads lines, stripping a trailing '\r'; skips blank lines.
inline bool next_line(std::istream& in, std::string& line,
                      std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

}  // namespace csv_detail

struct InstanceData {
  std::vector<ScoredInstance> instances;
  bool has_subspace = false;
  bool has_cost = false;
};

/// Reads the scored-instance CSV: header with `score` and `label` columns,
/// optional `subspace` and `cost`; other columns are ignored. Any unparsable
/// field aborts with a line-numbered error.
inline InstanceData read_instances(std::istream& in,
                                   const std::string& source) {
  namespace cd = csv_detail;
  std::string line;
  std::size_t lineno = 0;
  if (!cd::next_line(in, line, lineno)) {
    throw ParseError(source, 0, "no instances: empty input");
  }
  const std::vector<std::string> header = cd::split_line(line, source, lineno);
  std::ptrdiff_t score_col = -1, label_col = -1, subspace_col = -1,
                 cost_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "score") score_col = i;
    if (header[i] == "label") label_col = i;
    if (header[i] == "subspace") subspace_col = i;
    if (header[i] == "cost") cost_col = i;
  }
  if (score_col < 0 || label_col < 0) {
    throw ParseError(source, lineno,
                     "header must name 'score' and 'label' columns");
  }
  InstanceData data;
  data.has_subspace = subspace_col >= 0;
  data.has_cost = cost_col >= 0;
  while (cd::next_line(in, line, lineno)) {
    const std::vector<std::string> fields =
        cd::split_line(line, source, lineno);
    if (fields.size() < header.size()) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()));
    }
    ScoredInstance inst;
    inst.score =
        cd::parse_double_field(fields[score_col], source, lineno, "score");
    const std::string& label = fields[label_col];
    if (label == "0") {
      inst.label = 0;
    } else if (label == "1") {
      inst.label = 1;
    } else {
      throw ParseError(source, lineno,
                       "invalid label '" + label + "' (expected 0 or 1)");
    }
    if (subspace_col >= 0) inst.subspace = fields[subspace_col];
    if (cost_col >= 0) {
      try {
        inst.cost = parse_decimal(fields[cost_col]);
      } catch (const ValidationError& e) {
        throw ParseError(source, lineno, std::string("invalid cost: ") +
                                             e.what());
      }
    }
    try {
      validate_instance(inst);
    } catch (const ValidationError& e) {
      throw ParseError(source, lineno, e.what());
    }
    data.instances.push_back(std::move(inst));
  }
  return data;
}

inline constexpr std::string_view kSheetColumns[] = {
    "subspace", "threshold", "tp",      "fp",      "tn",
    "fn",       "tp_cost",   "fp_cost", "tn_cost", "fn_cost"};

/// Writes the sensitivity sheet: the ten canonical columns plus one column
/// per requested metric. Cost cells are exact decimals when the data carried
/// costs and empty otherwise, so re-ingesting preserves cost availability.
inline void write_sensitivity_csv(std::ostream& out,
                                  const SensitivityMap& tables,
                                  const std::vector<MetricKind>& metrics =
                                      std::vector<MetricKind>()) {
  namespace cd = csv_detail;
  for (const auto& [key, table] : tables) {
    for (const auto& kind : metrics) {
      if (kind.needs_cost() && !table.has_cost) {
        throw MissingCostError("metric '" + kind.name() +
                               "' requires cost data, but none was ingested");
      }
    }
    (void)key;
  }
  for (std::size_t i = 0; i < std::size(kSheetColumns); ++i) {
    if (i > 0) out << ',';
    out << kSheetColumns[i];
  }
  for (const auto& kind : metrics) {
    out << ',' << cd::quote_field(kind.name());
  }
  out << '\n';
  for (const auto& [key, table] : tables) {
    for (const auto& row : table.rows) {
      out << cd::quote_field(key) << ',' << format_double(row.threshold) << ','
          << row.tp << ',' << row.fp << ',' << row.tn << ',' << row.fn;
      if (table.has_cost) {
        out << ',' << rat_string(row.tp_cost) << ',' << rat_string(row.fp_cost)
            << ',' << rat_string(row.tn_cost) << ','
            << rat_string(row.fn_cost);
      } else {
        out << ",,,,";
      }
      for (const auto& kind : metrics) {
        out << ',' << format_double(evaluate(row, kind));
      }
      out << '\n';
    }
  }
}

/// Reads a sensitivity sheet back into tables, validating the structural
/// invariants: thresholds strictly ascending per subspace, constant row sums,
/// monotone counts and cost aggregates.
inline SensitivityMap read_sensitivity_csv(std::istream& in,
                                           const std::string& source) {
  namespace cd = csv_detail;
  std::string line;
  std::size_t lineno = 0;
  if (!cd::next_line(in, line, lineno)) {
    throw ParseError(source, 0, "empty sensitivity sheet");
  }
  const std::vector<std::string> header = cd::split_line(line, source, lineno);
  if (header.size() < std::size(kSheetColumns)) {
    throw ParseError(source, lineno, "sensitivity header too short");
  }
  for (std::size_t i = 0; i < std::size(kSheetColumns); ++i) {
    if (header[i] != kSheetColumns[i]) {
      throw ParseError(source, lineno,
                       "sensitivity header column " + std::to_string(i + 1) +
                           " must be '" + std::string(kSheetColumns[i]) +
                           "', got '" + header[i] + "'");
    }
  }

  SensitivityMap tables;
  int file_has_cost = -1;  // -1 undecided, 0 no, 1 yes
  while (cd::next_line(in, line, lineno)) {
    const std::vector<std::string> fields =
        cd::split_line(line, source, lineno);
    if (fields.size() < std::size(kSheetColumns)) {
      throw ParseError(source, lineno, "row has too few fields");
    }
    ThresholdRow row;
    row.threshold =
        cd::parse_double_field(fields[1], source, lineno, "threshold");
    if (!(row.threshold >= 0.0 && row.threshold <= 1.0)) {
      throw ParseError(source, lineno, "threshold out of range [0,1]");
    }
    row.tp = cd::parse_count_field(fields[2], source, lineno, "tp");
    row.fp = cd::parse_count_field(fields[3], source, lineno, "fp");
    row.tn = cd::parse_count_field(fields[4], source, lineno, "tn");
    row.fn = cd::parse_count_field(fields[5], source, lineno, "fn");
    const bool costs_empty = fields[6].empty() && fields[7].empty() &&
                             fields[8].empty() && fields[9].empty();
    const bool costs_full = !fields[6].empty() && !fields[7].empty() &&
                            !fields[8].empty() && !fields[9].empty();
    if (!costs_empty && !costs_full) {
      throw ParseError(source, lineno,
                       "cost columns must be all present or all empty");
    }
    const int row_has_cost = costs_full ? 1 : 0;
    if (file_has_cost == -1) {
      file_has_cost = row_has_cost;
    } else if (file_has_cost != row_has_cost) {
      throw ParseError(source, lineno,
                       "cost columns must be filled consistently across rows");
    }
    if (costs_full) {
      try {
        row.tp_cost = parse_decimal(fields[6]);
        row.fp_cost = parse_decimal(fields[7]);
        row.tn_cost = parse_decimal(fields[8]);
        row.fn_cost = parse_decimal(fields[9]);
      } catch (const ValidationError& e) {
        throw ParseError(source, lineno, std::string("invalid cost: ") +
                                             e.what());
      }
      if (row.tp_cost < 0 || row.fp_cost < 0 || row.tn_cost < 0 ||
          row.fn_cost < 0) {
        throw ParseError(source, lineno, "cost aggregates must be >= 0");
      }
    }

    SensitivityTable& table = tables[fields[0]];
    if (table.rows.empty()) {
      table.subspace = fields[0];
      table.positive_count = row.tp + row.fn;
      table.negative_count = row.fp + row.tn;
      table.has_cost = costs_full;
    } else {
      const ThresholdRow& prev = table.rows.back();
      if (!(row.threshold > prev.threshold)) {
        throw ParseError(source, lineno,
                         "thresholds must be strictly ascending within "
                         "subspace '" +
                             fields[0] + "'");
      }
      if (row.tp + row.fn != table.positive_count ||
          row.fp + row.tn != table.negative_count) {
        throw ParseError(source, lineno,
                         "row sums tp+fn / fp+tn must be constant within "
                         "subspace '" +
                             fields[0] + "'");
      }
      if (row.tp > prev.tp || row.fp > prev.fp || row.tn < prev.tn ||
          row.fn < prev.fn) {
        throw ParseError(source, lineno,
                         "counts must be monotone in the threshold");
      }
      if (row.tp_cost > prev.tp_cost || row.fp_cost > prev.fp_cost ||
          row.tn_cost < prev.tn_cost || row.fn_cost < prev.fn_cost) {
        throw ParseError(source, lineno,
                         "cost aggregates must be monotone in the threshold");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (tables.empty()) {
    throw ParseError(source, lineno, "sensitivity sheet has no rows");
  }
  return tables;
}

enum class InputKind { kScores, kSheet };

/// Distinguishes a scored-instance CSV from a sensitivity sheet by header.
inline InputKind detect_input_kind(std::istream& in,
                                   const std::string& source) {
  namespace cd = csv_detail;
  std::string line;
  std::size_t lineno = 0;
  if (!cd::next_line(in, line, lineno)) {
    throw ParseError(source, 0, "no instances: empty input");
  }
  const std::vector<std::string> header = cd::split_line(line, source, lineno);
  bool has_score = false, has_label = false, has_threshold = false,
       has_tp = false;
  for (const auto& h : header) {
    if (h == "score") has_score = true;
    if (h == "label") has_label = true;
    if (h == "threshold") has_threshold = true;
    if (h == "tp") has_tp = true;
  }
  if (has_score && has_label) return InputKind::kScores;
  if (has_threshold && has_tp) return InputKind::kSheet;
  throw ParseError(source, lineno,
                   "unrecognized input: expected score/label columns or a "
                   "sensitivity sheet");
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path, 0, "cannot open file");
  }
  return in;
}

inline InstanceData read_instances_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_instances(in, path);
}

inline SensitivityMap read_sensitivity_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_sensitivity_csv(in, path);
}

inline InputKind detect_input_kind_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return detect_input_kind(in, path);
}

}  // namespace otlp
