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

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace otlp {

enum class LogLevel { kOff = 0, kError = 1, kInfo = 2, kDebug = 3 };

/// Diagnostic verbosity, controlled by the OTLP_LOG environment variable:
/// "error", "info", "debug" (or 1/2/3). Unset or anything else is off.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("OTLP_LOG");
    if (env == nullptr) return LogLevel::kOff;
    const std::string_view v(env);
    if (v == "error" || v == "1") return LogLevel::kError;
    if (v == "info" || v == "2") return LogLevel::kInfo;
    if (v == "debug" || v == "3") return LogLevel::kDebug;
    return LogLevel::kOff;
  }();
  return level;
}

inline bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

inline void log_line(LogLevel level, std::string_view msg) {
  if (log_enabled(level)) {
    std::cerr << "[otlp] " << msg << "\n";
  }
}

}  // namespace otlp
