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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace otlp {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (CSV file or JSON config). Carries the source name
/// and a 1-based line number when the offending line is known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(format(source, line, what)),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line,
                            const std::string& what) {
    std::string msg = source;
    if (line > 0) {
      msg += ":" + std::to_string(line);
    }
    msg += ": " + what;
    return msg;
  }

  std::string source_;
  std::size_t line_;
};

/// Structurally readable input that violates a contract: out-of-range values,
/// unknown metric names, conflicting options.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A cost-based metric or constraint was requested but the ingested data has
/// no cost column. Kept distinct so callers can tell it apart from other
/// validation failures.
class MissingCostError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum class InfeasibleCause {
  kLocalFilter,  // a subspace has no row satisfying its local constraints
  kCoupling,     // no tuple of rows satisfies the global constraints
};

/// No threshold selection satisfies the constraints.
class InfeasibleError : public Error {
 public:
  InfeasibleError(InfeasibleCause cause, std::string subspace,
                  std::string constraint, const std::string& what)
      : Error(what),
        cause_(cause),
        subspace_(std::move(subspace)),
        constraint_(std::move(constraint)) {}

  InfeasibleCause cause() const { return cause_; }
  /// Offending subspace key; empty for coupling infeasibility.
  const std::string& subspace() const { return subspace_; }
  /// Human-readable rendering of the binding constraint.
  const std::string& constraint() const { return constraint_; }

 private:
  InfeasibleCause cause_;
  std::string subspace_;
  std::string constraint_;
};

/// A node or tuple budget was exhausted before the solver finished. Never a
/// silent suboptimal return.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace otlp
