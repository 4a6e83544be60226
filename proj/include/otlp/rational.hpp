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
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "otlp/error.hpp"

namespace otlp {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. All feasibility decisions in this library are made
/// on Rat values or on integers derived from them; doubles are for reporting.
using Rat = boost::multiprecision::cpp_rational;

inline Rat make_rat(std::int64_t num, std::int64_t den = 1) {
  return Rat(BigInt(num), BigInt(den));
}

/// Nearest double. Exact division fast path keeps small grid fractions
/// (e.g. 70/200) correctly rounded.
inline double to_double(const Rat& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  static const BigInt kDoubleExact = BigInt(1) << 53;
  if (boost::multiprecision::abs(num) < kDoubleExact && den < kDoubleExact) {
    return static_cast<double>(num.convert_to<std::int64_t>()) /
           static_cast<double>(den.convert_to<std::int64_t>());
  }
  return r.convert_to<double>();
}

/// Parses a plain decimal literal ("42", "-0.98", "1.5e-3") to an exact
/// rational. Throws ValidationError on anything else.
inline Rat parse_decimal(std::string_view text) {
  const auto fail = [&]() -> Rat {
    throw ValidationError("not a decimal number: '" + std::string(text) + "'");
  };
  std::size_t i = 0;
  const std::size_t n = text.size();
  bool negative = false;
  if (i < n && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  BigInt digits = 0;
  std::int64_t frac_digits = 0;
  std::size_t digit_count = 0;
  for (; i < n && text[i] >= '0' && text[i] <= '9'; ++i) {
    digits = digits * 10 + (text[i] - '0');
    ++digit_count;
  }
  if (i < n && text[i] == '.') {
    ++i;
    for (; i < n && text[i] >= '0' && text[i] <= '9'; ++i) {
      digits = digits * 10 + (text[i] - '0');
      ++digit_count;
      ++frac_digits;
    }
  }
  if (digit_count == 0) return fail();
  std::int64_t exponent = 0;
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < n && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    if (i >= n) return fail();
    std::int64_t exp_value = 0;
    for (; i < n && text[i] >= '0' && text[i] <= '9'; ++i) {
      exp_value = exp_value * 10 + (text[i] - '0');
      if (exp_value > 100000) return fail();
    }
    exponent = exp_negative ? -exp_value : exp_value;
  }
  if (i != n) return fail();

  const std::int64_t power = exponent - frac_digits;
  BigInt num = negative ? BigInt(-digits) : digits;
  BigInt den = 1;
  if (power >= 0) {
    num *= boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(power));
  } else {
    den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-power));
  }
  return Rat(num, den);
}

/// Exact decimal rendering, available iff the denominator is of the form
/// 2^a * 5^b. The shortest such rendering is produced ("7/20" -> "0.35").
inline std::optional<std::string> decimal_string(const Rat& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  unsigned twos = 0, fives = 0;
  BigInt rest = den;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) return std::nullopt;
  const unsigned scale = twos > fives ? twos : fives;
  const BigInt mult = boost::multiprecision::pow(BigInt(10), scale) / den;
  const bool negative = num < 0;
  BigInt digits = boost::multiprecision::abs(num) * mult;
  std::string s = digits.str();
  if (s.size() <= scale) {
    s.insert(0, scale + 1 - s.size(), '0');
  }
  s.insert(s.size() - scale, ".");
  if (negative) s.insert(0, "-");
  return s;
}

/// Decimal rendering when exact, "num/den" otherwise.
inline std::string rat_string(const Rat& r) {
  if (auto dec = decimal_string(r)) return *dec;
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

}  // namespace otlp
