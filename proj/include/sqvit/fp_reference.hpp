/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// FP64 reference implementations of every quantized operator, written as
// plain loops. The *_series variants evaluate the same truncated polynomials
// as the quantized operators so that quantization error can be measured apart
// from approximation error.

#pragma once

#include <span>
#include <vector>

#include "sqvit/convert.hpp"
#include "sqvit/qnn_ops.hpp"
#include "sqvit/tensor.hpp"

namespace sqvit::ref {

FTensor conv2d(const FTensor& input, const FTensor& weight, const FTensor& bias,
               const ConvSpec& spec);
FTensor depthwise_conv2d(const FTensor& input, const FTensor& weight, const FTensor& bias,
                         ConvSpec spec);
FTensor linear(const FTensor& x, const FTensor& weight, const FTensor& bias);
FTensor matmul(const FTensor& a, const FTensor& b);
FTensor transpose(const FTensor& a);

FTensor layer_norm(const FTensor& x, const FTensor& gamma, const FTensor& beta, double eps);

std::vector<double> softmax_exact(std::span<const double> x);
std::vector<double> softmax_series(std::span<const double> x);

enum class SoftmaxKind { kExact, kSeries };
FTensor softmax(const FTensor& x, SoftmaxKind kind);

// 0.5x(1 + tanh(sqrt(2/pi)(x + 0.044715x^3)))
double gelu_exact(double x);
double gelu_series(double x, GeluVariant variant);
FTensor gelu_exact(const FTensor& x);
FTensor gelu_series(const FTensor& x, GeluVariant variant);

double relu(double x);
FTensor relu(const FTensor& x);

// y_{j+1} = y_j - (y_j^3 x - y_j) / 2. Returns y_0 .. y_iters.
std::vector<double> newton_inv_sqrt(double x, double y0, int iters);

FTensor attention(const FTensor& q, const FTensor& k, const FTensor& v, std::size_t d_m,
                  SoftmaxKind kind = SoftmaxKind::kSeries);
FTensor factorized_attention(const FTensor& q, const FTensor& k, const FTensor& v,
                             std::size_t d_m, SoftmaxKind kind = SoftmaxKind::kSeries);

struct ErrorStats {
  double mse = 0.0;
  double max_abs_err = 0.0;
  std::size_t count = 0;
};

// Mean over all elements of (dequantize(q) - reference)^2.
ErrorStats mse(const QTensor& quantized, const FTensor& reference);
ErrorStats mse(const FTensor& actual, const FTensor& reference);

}  // namespace sqvit::ref
