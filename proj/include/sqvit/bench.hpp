/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sqvit/convert.hpp"
#include "sqvit/scaled_int.hpp"

namespace sqvit::bench {

enum class Operator {
  kConv2d,
  kDepthwiseConv2d,
  kLinear,
  kLayerNorm,
  kSoftmax,
  kGelu,
  kRelu,
  kAttention,
  kFactorizedAttention,
};

std::string_view operator_name(Operator op);
Operator parse_operator(std::string_view name);  // throws UsageError

// One MSE experiment. Tensor layouts per operator:
//   conv2d / depthwise_conv2d  input [B, I, H, W], weight [O, I|1, K, K]
//   linear                     input [B, H, W, I], weight [O, I]
//   layer_norm / softmax       input [B, I, H, W], reduced over W
//   gelu / relu                input [B, I, H, W], elementwise
//   attention variants         Q, K, V [H, W], d_m = W
struct ExperimentSpec {
  Operator op = Operator::kConv2d;
  std::size_t batch = 1;
  std::size_t in_channels = 3;
  std::size_t out_channels = 3;
  std::size_t kernel = 1;
  std::size_t height = 16;
  std::size_t width = 16;
  int trials = 25;
  std::uint64_t seed = 0;
  double input_lo = 0.0;
  double input_hi = 1.0;
  double weight_lo = -1.0;
  double weight_hi = 1.0;
  // Overrides the config's variant for gelu experiments.
  std::optional<GeluVariant> gelu_variant;
  // Replaces the generated input in every trial; dimensions are taken from
  // its shape.
  std::optional<FTensor> input;

  void validate() const;  // throws UsageError
  std::string label(const ScaleConfig& cfg) const;
};

struct BenchReport {
  std::string op_label;
  std::size_t batch = 0, in_channels = 0, out_channels = 0, kernel = 0, height = 0, width = 0;
  int trials = 0;
  double mse = 0.0;
  double max_abs_err = 0.0;
  std::uint64_t saturations = 0;
  int bits_per_element = 0;
  double reduction_factor = 0.0;
  double wall_seconds = 0.0;
  // FNV-1a over every quantized output element in trial order.
  std::uint64_t output_digest = 0;
};

// splitmix64(master ^ splitmix64(trial)): independent, reproducible streams.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

// Deterministic in (spec, cfg); jobs > 1 evaluates trials on worker threads
// and reduces them in trial order.
BenchReport run_bench(const ExperimentSpec& spec, const ScaleConfig& cfg, unsigned jobs = 1);

// Twelve reference experiments at desk scale (16x16 inputs, K = 1).
std::vector<ExperimentSpec> desk_suite(std::uint64_t seed, int trials = 25);

std::string csv_header();
std::string to_csv_row(const BenchReport& r);
nlohmann::json to_json(const BenchReport& r);

struct MemoryReport {
  int p_bits = 0;
  int scale_bits = 0;
  int bits_per_element = 0;
  double reduction_factor = 0.0;  // 64 / bits_per_element
};
MemoryReport memory_report(const ScaleConfig& cfg);

// Exhaustive division check over magnitudes [1, 2^P - 1]^2 at scale 0.
struct DivSweepReport {
  std::uint64_t cases = 0;
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  std::uint32_t worst_dividend = 0;
  std::uint32_t worst_divisor = 0;
  std::uint64_t divisible_cases = 0;
  std::uint64_t divisible_inexact = 0;
};
DivSweepReport div_sweep(const ScaleConfig& cfg);

struct InvSqrtRow {
  int iteration = 0;
  ScaledInt quantized;
  double fp64 = 0.0;
};
struct InvSqrtReport {
  double value = 0.0;
  ScaledInt input;
  ScaledInt seed;
  std::vector<InvSqrtRow> rows;
  double exact = 0.0;
};
// Quantized and FP64 iterations side by side. The FP64 column starts from the
// dequantized seed and iterates on `value`.
InvSqrtReport invsqrt_trace(double value, const ScaledInt& x, const ScaledInt& y0, int iters,
                            const ScaleConfig& cfg);
std::string render_csv(const InvSqrtReport& r);

}  // namespace sqvit::bench
