/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// Quantized vision-transformer operators composed from the ScaledInt
// primitives. Sums follow one discipline throughout: every term of a sum is
// aligned to the largest scale in the set and accumulated left to right in a
// 2P-bit register (see Accumulator), then stored back to P bits.

#pragma once

#include <span>
#include <vector>

#include "sqvit/scaled_int.hpp"
#include "sqvit/tensor.hpp"

namespace sqvit {

struct ConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  bool depthwise = false;

  void validate() const;
};

struct LayerNormParams {
  QTensor gamma;
  QTensor beta;
  ScaledInt eps;
};

// eps = 2^-scale_max, the smallest positive value of the format.
ScaledInt default_layer_norm_eps(const ScaleConfig& cfg);
// gamma = 1, beta = 0, default eps.
LayerNormParams identity_layer_norm_params(std::size_t n, const ScaleConfig& cfg);

// input [B, I, H, W], weight [O, I, K, K] (depthwise: [O, 1, K, K]), bias [O].
QTensor conv2d(const QTensor& input, const QTensor& weight, const QTensor& bias,
               const ConvSpec& spec, const ScaleConfig& cfg, SaturationCounter* sat = nullptr);

// Grouped convolution with one group per input channel; O must be a multiple
// of I and output channel o reads input channel o / (O / I).
QTensor depthwise_conv2d(const QTensor& input, const QTensor& weight, const QTensor& bias,
                         ConvSpec spec, const ScaleConfig& cfg,
                         SaturationCounter* sat = nullptr);

// y = x W^T + b over the last axis. x [..., I], weight [O, I], bias [O].
QTensor linear(const QTensor& x, const QTensor& weight, const QTensor& bias,
               const ScaleConfig& cfg, SaturationCounter* sat = nullptr);

QTensor matmul(const QTensor& a, const QTensor& b, const ScaleConfig& cfg,
               SaturationCounter* sat = nullptr);
QTensor transpose(const QTensor& a);

// Normalizes over the last axis with population variance. Rows whose
// deviations are all zero return beta.
QTensor layer_norm(const QTensor& x, const LayerNormParams& params, const ScaleConfig& cfg,
                   SaturationCounter* sat = nullptr);

// (1 + x_i + x_i^2/2) / sum_j (1 + x_j + x_j^2/2)
std::vector<ScaledInt> softmax(std::span<const ScaledInt> x, const ScaleConfig& cfg,
                               SaturationCounter* sat = nullptr);
// Row-wise over the last axis.
QTensor softmax(const QTensor& x, const ScaleConfig& cfg, SaturationCounter* sat = nullptr);

ScaledInt gelu(const ScaledInt& x, GeluVariant variant, const ScaleConfig& cfg,
               SaturationCounter* sat = nullptr);
ScaledInt gelu(const ScaledInt& x, const ScaleConfig& cfg, SaturationCounter* sat = nullptr);
QTensor gelu(const QTensor& x, const ScaleConfig& cfg, SaturationCounter* sat = nullptr);

QTensor relu(const QTensor& x);

// Multiplies every element by s.
QTensor scale_tensor(const QTensor& x, const ScaledInt& s, const ScaleConfig& cfg,
                     SaturationCounter* sat = nullptr);

// 1/sqrt(d_m) from the Newton iteration with cfg.newton_iters steps.
ScaledInt inv_sqrt_dim(std::size_t d_m, const ScaleConfig& cfg, SaturationCounter* sat = nullptr);

// softmax(Q K^T / sqrt(d_m)) V. Q, K, V are [T, d].
QTensor attention(const QTensor& q, const QTensor& k, const QTensor& v, std::size_t d_m,
                  const ScaleConfig& cfg, SaturationCounter* sat = nullptr);
// Same with a precomputed 1/sqrt(d_m).
QTensor attention(const QTensor& q, const QTensor& k, const QTensor& v,
                  const ScaledInt& inv_sqrt_dm, const ScaleConfig& cfg,
                  SaturationCounter* sat = nullptr);

// (Q / sqrt(d_m)) (softmax_T(K)^T V), softmax taken over the token axis of
// each column of K.
QTensor factorized_attention(const QTensor& q, const QTensor& k, const QTensor& v,
                             std::size_t d_m, const ScaleConfig& cfg,
                             SaturationCounter* sat = nullptr);
QTensor factorized_attention(const QTensor& q, const QTensor& k, const QTensor& v,
                             const ScaledInt& inv_sqrt_dm, const ScaleConfig& cfg,
                             SaturationCounter* sat = nullptr);

}  // namespace sqvit
