/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sqvit/errors.hpp"
#include "sqvit/fp_reference.hpp"

namespace sqvit::ref {
namespace {

TEST(RefGelu, Exact) {
  EXPECT_EQ(gelu_exact(0.0), 0.0);
  EXPECT_NEAR(gelu_exact(1.0), 0.841192, 1e-6);
  EXPECT_NEAR(gelu_exact(-1.0), -0.158808, 1e-6);
  EXPECT_NEAR(gelu_series(1.0, GeluVariant::kSeriesLinear), 0.916015625, 1e-12);
}

TEST(RefSoftmax, ExactSumsToOne) {
  const std::vector<double> x{0.3, -2.0, 5.0, 1.25, 0.0};
  const auto y = softmax_exact(x);
  EXPECT_NEAR(std::accumulate(y.begin(), y.end(), 0.0), 1.0, 1e-12);
  const auto eq = softmax_exact(std::vector<double>(4, 2.5));
  for (double v : eq) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(RefSoftmax, Series) {
  const auto y = softmax_series(std::vector<double>{0.0, 1.0});
  EXPECT_DOUBLE_EQ(y[0], 2.0 / 7.0);
  EXPECT_DOUBLE_EQ(y[1], 5.0 / 7.0);
  EXPECT_THROW(softmax_series(std::vector<double>{}), ShapeError);
}

TEST(RefLayerNorm, ConstantGivesBeta) {
  const FTensor x({3}, {4, 4, 4});
  const FTensor g({3}, {2, 3, 4});
  const FTensor b({3}, {0.5, -1, 0});
  EXPECT_EQ(layer_norm(x, g, b, 1e-5), b);
}

TEST(RefLayerNorm, Standardizes) {
  const FTensor x({4}, {1, 2, 3, 4});
  const FTensor out = layer_norm(x, FTensor({4}, {1, 1, 1, 1}), FTensor({4}), 0.0);
  EXPECT_NEAR(out[0], -1.3416408, 1e-6);
  EXPECT_NEAR(out[3], 1.3416408, 1e-6);
}

TEST(RefConv, DepthwiseEqualsGroupedSum) {
  const FTensor x({1, 2, 1, 1}, {3, 5});
  const FTensor w({2, 1, 1, 1}, {2, -1});
  const FTensor b({2}, {1, 1});
  EXPECT_EQ(depthwise_conv2d(x, w, b, ConvSpec{2, 2, 1}), FTensor({1, 2, 1, 1}, {7, -4}));
}

TEST(RefAttention, SingleToken) {
  const FTensor q({1, 2}, {1, 2});
  const FTensor v({1, 2}, {3, 4});
  EXPECT_EQ(attention(q, q, v, 2), v);
}

TEST(RefMse, Basics) {
  const FTensor a({3}, {1, 2, 3});
  EXPECT_EQ(mse(a, a).mse, 0.0);
  const FTensor b({3}, {1.5, 2.5, 3.5});
  const ErrorStats s = mse(b, a);
  EXPECT_DOUBLE_EQ(s.mse, 0.25);
  EXPECT_DOUBLE_EQ(s.max_abs_err, 0.5);
  EXPECT_EQ(s.count, 3u);
  EXPECT_THROW(mse(a, FTensor({2})), ShapeError);
}

}  // namespace
}  // namespace sqvit::ref
