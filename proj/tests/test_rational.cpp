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

#include "otlp/rational.hpp"

#include <gtest/gtest.h>

namespace {

using otlp::Rat;
using otlp::make_rat;

TEST(Rational, ParseDecimalBasics) {
  EXPECT_EQ(otlp::parse_decimal("0.98"), make_rat(49, 50));
  EXPECT_EQ(otlp::parse_decimal("0.005"), make_rat(1, 200));
  EXPECT_EQ(otlp::parse_decimal("42"), Rat(42));
  EXPECT_EQ(otlp::parse_decimal("-0.25"), make_rat(-1, 4));
  EXPECT_EQ(otlp::parse_decimal("+3.50"), make_rat(7, 2));
  EXPECT_EQ(otlp::parse_decimal(".5"), make_rat(1, 2));
  EXPECT_EQ(otlp::parse_decimal("5."), Rat(5));
}

TEST(Rational, ParseDecimalExponents) {
  EXPECT_EQ(otlp::parse_decimal("-1.5e3"), Rat(-1500));
  EXPECT_EQ(otlp::parse_decimal("2.5e-2"), make_rat(1, 40));
  EXPECT_EQ(otlp::parse_decimal("1E2"), Rat(100));
}

TEST(Rational, ParseDecimalRejectsGarbage) {
  EXPECT_THROW(otlp::parse_decimal(""), otlp::ValidationError);
  EXPECT_THROW(otlp::parse_decimal("abc"), otlp::ValidationError);
  EXPECT_THROW(otlp::parse_decimal("1.2.3"), otlp::ValidationError);
  EXPECT_THROW(otlp::parse_decimal("1e"), otlp::ValidationError);
  EXPECT_THROW(otlp::parse_decimal("--1"), otlp::ValidationError);
  EXPECT_THROW(otlp::parse_decimal("1/3"), otlp::ValidationError);
}

TEST(Rational, DecimalString) {
  EXPECT_EQ(otlp::decimal_string(make_rat(7, 20)).value(), "0.35");
  EXPECT_EQ(otlp::decimal_string(make_rat(-3, 8)).value(), "-0.375");
  EXPECT_EQ(otlp::decimal_string(Rat(5)).value(), "5");
  EXPECT_EQ(otlp::decimal_string(make_rat(1, 200)).value(), "0.005");
  EXPECT_FALSE(otlp::decimal_string(make_rat(1, 3)).has_value());
  EXPECT_EQ(otlp::rat_string(make_rat(1, 3)), "1/3");
  EXPECT_EQ(otlp::rat_string(make_rat(49, 50)), "0.98");
}

TEST(Rational, ParseFormatRoundTrip) {
  for (const char* text : {"0.98", "0.005", "0.245", "123.456", "-7.125"}) {
    EXPECT_EQ(otlp::rat_string(otlp::parse_decimal(text)), text);
  }
}

TEST(Rational, ToDoubleSmallFractions) {
  EXPECT_EQ(otlp::to_double(make_rat(70, 200)), 0.35);
  EXPECT_EQ(otlp::to_double(make_rat(49, 200)), 0.245);
  EXPECT_EQ(otlp::to_double(make_rat(181, 200)), 0.905);
}

}  // namespace
