/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include <cmath>

#include "sqvit/convert.hpp"
#include "sqvit/errors.hpp"
#include "sqvit/scaled_int.hpp"
#include "test_util.hpp"

namespace sqvit {
namespace {

using testing::kCfg;
using testing::si;

TEST(ScaleConfig, DefaultsAndRanges) {
  EXPECT_EQ(kCfg.max_magnitude(), 255u);
  EXPECT_EQ(kCfg.scale_min(), -16);
  EXPECT_EQ(kCfg.scale_max(), 15);
  EXPECT_EQ(kCfg.bits_per_element(), 13);
  EXPECT_NO_THROW(kCfg.validate());
}

TEST(ScaleConfig, RejectsBadFields) {
  ScaleConfig c;
  c.p_bits = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.p_bits = 17;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.scale_bits = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.div_t_max = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.newton_iters = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(GeluVariantNames, RoundTrip) {
  for (auto v : {GeluVariant::kSeriesCubed, GeluVariant::kSeriesCubedCorrected,
                 GeluVariant::kSeriesLinear}) {
    EXPECT_EQ(parse_gelu_variant(to_string(v)), v);
  }
  EXPECT_THROW(parse_gelu_variant("tanh"), ConfigError);
}

TEST(ScaledIntConstruct, ValidatesRange) {
  EXPECT_THROW(ScaledInt::from_parts(256, false, 0, kCfg), RangeError);
  EXPECT_THROW(ScaledInt::from_parts(1, false, 16, kCfg), RangeError);
  EXPECT_THROW(ScaledInt::from_parts(1, false, -17, kCfg), RangeError);
  EXPECT_THROW(si(-256, 0), RangeError);
  const ScaledInt n = si(-7, 2);
  EXPECT_TRUE(n.negative());
  EXPECT_EQ(n.magnitude(), 7u);
  EXPECT_EQ(n.signed_value(), -7);
}

TEST(ScaledIntConstruct, ZeroIsCanonical) {
  EXPECT_EQ(si(0, 5), ScaledInt{});
  EXPECT_EQ(ScaledInt::from_parts(0, true, -3, kCfg), ScaledInt{});
  EXPECT_EQ(ScaledInt{}.negated(), ScaledInt{});
}

TEST(Quantize, MaxPrecision) {
  const ScaledInt q = quantize(15.25, kCfg);
  EXPECT_EQ(q.magnitude(), 244u);
  EXPECT_EQ(q.scale(), 4);
  EXPECT_EQ(quantize(0.0, kCfg), ScaledInt{});
  const double back = dequantize(quantize(0.2561, kCfg));
  EXPECT_LE(std::fabs(back - 0.2561) / 0.2561, std::ldexp(1.0, -7));
}

TEST(Quantize, Bounds) {
  EXPECT_EQ(quantize(255.0 * 65536.0, kCfg), si(255, -16));
  EXPECT_THROW(quantize(256.0 * 65536.0, kCfg), RangeError);
  EXPECT_THROW(quantize(NAN, kCfg), RangeError);
  EXPECT_THROW(quantize(INFINITY, kCfg), RangeError);
  // Below the smallest step rounds to zero.
  EXPECT_EQ(quantize(std::ldexp(1.0, -17), kCfg), ScaledInt{});
  EXPECT_EQ(quantize(-0.75, kCfg).signed_value(), -192);
}

TEST(Dequantize, Values) {
  EXPECT_DOUBLE_EQ(dequantize(si(122, 3)), 15.25);
  EXPECT_DOUBLE_EQ(dequantize(si(33, 7)), 0.2578125);
  EXPECT_DOUBLE_EQ(dequantize(si(0, 0)), 0.0);
  EXPECT_DOUBLE_EQ(dequantize(si(-3, -2)), -12.0);
}

TEST(HandleOverflow, KeepsMostSignificantBits) {
  EXPECT_EQ(handle_overflow(300, 5, kCfg), si(150, 4));
  EXPECT_EQ(handle_overflow(255, 5, kCfg), si(255, 5));
  const ScaledInt r = handle_overflow(1020, 0, kCfg);
  EXPECT_EQ(r, si(255, -2));
  EXPECT_DOUBLE_EQ(dequantize(r), 1020.0);
  EXPECT_EQ(handle_overflow(0, 9, kCfg), ScaledInt{});
  EXPECT_EQ(handle_overflow(300, true, 5, kCfg), si(-150, 4));
}

TEST(HandleOverflow, ScaleAboveMaxShiftsRight) {
  EXPECT_EQ(handle_overflow(8, 17, kCfg), si(2, 15));
  EXPECT_EQ(handle_overflow(1, 17, kCfg), ScaledInt{});
}

TEST(HandleOverflow, ScaleBelowMinShiftsLeftOrSaturates) {
  SaturationCounter sat;
  EXPECT_EQ(handle_overflow(3, -18, kCfg, &sat), si(12, -16));
  EXPECT_EQ(sat.count, 0u);
  EXPECT_EQ(handle_overflow(200, -18, kCfg, &sat), si(255, -16));
  EXPECT_EQ(sat.count, 1u);
  EXPECT_EQ(handle_overflow(1u << 20, -10, kCfg, &sat), si(255, -16));
  EXPECT_EQ(sat.count, 2u);
}

TEST(ScaleMul, Examples) {
  EXPECT_EQ(scale_mul(si(3, 1), si(5, 2), kCfg), si(15, 3));
  const ScaledInt r = scale_mul(si(16, 2), si(32, 1), kCfg);
  EXPECT_EQ(r, si(128, 1));
  EXPECT_DOUBLE_EQ(dequantize(r), 64.0);
  for (auto x : {si(17, 3), si(-255, -16), si(1, 15), ScaledInt{}}) {
    EXPECT_EQ(scale_mul(x, si(1, 0), kCfg), x);
  }
  EXPECT_EQ(scale_mul(si(-3, 0), si(-2, 0), kCfg), si(6, 0));
  EXPECT_EQ(scale_mul(si(-3, 0), si(2, 0), kCfg), si(-6, 0));
}

TEST(ScaleAdd, Examples) {
  EXPECT_EQ(scale_add(si(1, 6), si(2, 6), kCfg), si(3, 6));
  EXPECT_EQ(scale_add(si(1, 1), si(1, 3), kCfg), si(5, 3));
  EXPECT_EQ(scale_add(si(255, 0), si(255, 0), kCfg), si(255, -1));
  EXPECT_EQ(scale_sub(si(5, 2), si(5, 2), kCfg), ScaledInt{});
  EXPECT_EQ(scale_add(si(5, 2), si(-7, 2), kCfg), si(-2, 2));
  EXPECT_EQ(scale_sub(si(1, 0), si(3, 2), kCfg), si(1, 2));
}

TEST(ScaleAdd, LargeScaleGapTruncatesSmallTerm) {
  // 255 + 2^-15: exact sum needs 23 bits, truncation keeps 255.
  EXPECT_EQ(scale_add(si(255, 0), si(1, 15), kCfg), si(255, 0));
  // Negative tiny term borrows one LSB under truncation toward zero.
  EXPECT_EQ(scale_add(si(255, 0), si(-1, 15), kCfg), si(254, 0));
  EXPECT_EQ(scale_add(si(1, 15), si(255, -16), kCfg), si(255, -16));
}

TEST(ScaleDiv, Examples) {
  EXPECT_EQ(scale_div(si(15, 0), si(3, 0), kCfg), si(5, 0));
  EXPECT_DOUBLE_EQ(dequantize(scale_div(si(7, 0), si(2, 0), kCfg)), 3.5);
  EXPECT_DOUBLE_EQ(dequantize(scale_div(si(122, 3), si(2, 0), kCfg)), 7.625);
  const double third = dequantize(scale_div(si(1, 0), si(3, 0), kCfg));
  EXPECT_LE(std::fabs(third - 1.0 / 3.0), std::ldexp(1.0, -6));
  EXPECT_DOUBLE_EQ(dequantize(scale_div(si(-7, 0), si(2, 0), kCfg)), -3.5);
  EXPECT_DOUBLE_EQ(dequantize(scale_div(si(-7, 0), si(-2, 0), kCfg)), 3.5);
  EXPECT_DOUBLE_EQ(dequantize(scale_div(si(9, 0), si(9, 0), kCfg)), 1.0);
}

TEST(ScaleDiv, DivisorScaleFolded) {
  // 3 / 0.25 = 12
  EXPECT_DOUBLE_EQ(dequantize(scale_div(si(3, 0), si(1, 2), kCfg)), 12.0);
  // 0.75 / 6 = 0.125
  EXPECT_DOUBLE_EQ(dequantize(scale_div(si(3, 2), si(6, 0), kCfg)), 0.125);
}

TEST(ScaleDiv, ZeroCases) {
  EXPECT_THROW(scale_div(si(1, 0), ScaledInt{}, kCfg), DivisionByZero);
  EXPECT_EQ(scale_div(ScaledInt{}, si(3, 0), kCfg), ScaledInt{});
}

TEST(ScaleDiv, NeverOvershootsOnSweep) {
  for (std::uint32_t a = 1; a <= 255; ++a) {
    for (std::uint32_t b = 1; b <= 255; ++b) {
      const double got = dequantize(scale_div(si(a, 0), si(b, 0), kCfg));
      ASSERT_LE(got, static_cast<double>(a) / b) << a << "/" << b;
    }
  }
}

TEST(ScaleHalveDouble, MoveScale) {
  EXPECT_EQ(scale_halve(si(3, 1), kCfg), si(3, 2));
  EXPECT_EQ(scale_double(si(3, 1), kCfg), si(3, 0));
  EXPECT_EQ(scale_halve(si(4, 15), kCfg), si(2, 15));
}

TEST(Relu, Examples) {
  EXPECT_EQ(relu(si(5, 2)), si(5, 2));
  EXPECT_EQ(relu(si(-5, 2)), ScaledInt{});
  EXPECT_EQ(relu(ScaledInt{}), ScaledInt{});
}

TEST(ScaledSum, AlignsToMaxScale) {
  const std::vector<ScaledInt> terms{si(1, 0), si(1, 2), si(-3, 3)};
  EXPECT_EQ(max_scale(terms), 3);
  // 8/8 + 2/8 - 3/8 = 7/8
  EXPECT_EQ(scaled_sum(terms, kCfg), si(7, 3));
  EXPECT_EQ(max_scale(std::vector<ScaledInt>{}), 0);
  EXPECT_EQ(scaled_sum(std::vector<ScaledInt>{}, kCfg), ScaledInt{});
}

TEST(ScaledSum, CoarsensPastRegisterWidth) {
  // 300 copies of 255: 76500 exceeds 16 bits at scale 0.
  std::vector<ScaledInt> terms(300, si(255, 0));
  const ScaledInt r = scaled_sum(terms, kCfg);
  const double got = dequantize(r);
  EXPECT_LE(got, 76500.0);
  EXPECT_GE(got, 76500.0 * (1.0 - std::ldexp(1.0, -6)));
}

TEST(Accumulator, MatchesPairwiseWhenExact) {
  Accumulator acc(kCfg, 4);
  acc.add(si(3, 4));
  acc.add(si(-1, 2));
  acc.add(si(5, 0));
  EXPECT_DOUBLE_EQ(dequantize(acc.result()), 3.0 / 16 - 0.25 + 5.0);
}

}  // namespace
}  // namespace sqvit
