/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "sqvit/fp_reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sqvit/errors.hpp"

namespace sqvit::ref {

namespace {

void expect_rank(const FTensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(what) + " must have rank " + std::to_string(rank) + ", got " +
                     shape_string(t.shape()));
  }
}

FTensor conv_impl(const FTensor& input, const FTensor& weight, const FTensor& bias,
                  const ConvSpec& spec) {
  spec.validate();
  expect_rank(input, 4, "conv input");
  expect_rank(weight, 4, "conv weight");
  expect_rank(bias, 1, "conv bias");
  const std::size_t batch = input.dim(0);
  const std::size_t in_ch = spec.in_channels;
  const std::size_t out_ch = spec.out_channels;
  const std::size_t k = spec.kernel;
  if (input.dim(1) != in_ch) throw ShapeError("conv input channels do not match spec");
  if (weight.shape() != Shape{out_ch, spec.depthwise ? 1 : in_ch, k, k}) {
    throw ShapeError("conv weight shape does not match spec");
  }
  if (bias.dim(0) != out_ch) throw ShapeError("conv bias length does not match out_channels");

  const std::size_t h = input.dim(2);
  const std::size_t w = input.dim(3);
  if (h + 2 * spec.padding < k || w + 2 * spec.padding < k) {
    throw ShapeError("conv kernel larger than padded input");
  }
  const std::size_t out_h = (h + 2 * spec.padding - k) / spec.stride + 1;
  const std::size_t out_w = (w + 2 * spec.padding - k) / spec.stride + 1;
  const std::size_t multiplier = spec.depthwise ? out_ch / in_ch : 1;

  FTensor out({batch, out_ch, out_h, out_w});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < out_ch; ++o) {
      for (std::size_t oh = 0; oh < out_h; ++oh) {
        for (std::size_t ow = 0; ow < out_w; ++ow) {
          double acc = bias[o];
          for (std::size_t c = 0; c < in_ch; ++c) {
            if (spec.depthwise && c != o / multiplier) continue;
            const std::size_t wc = spec.depthwise ? 0 : c;
            for (std::size_t kh = 0; kh < k; ++kh) {
              for (std::size_t kw = 0; kw < k; ++kw) {
                const std::size_t ih = oh * spec.stride + kh;
                const std::size_t iw = ow * spec.stride + kw;
                if (ih < spec.padding || iw < spec.padding) continue;
                if (ih - spec.padding >= h || iw - spec.padding >= w) continue;
                acc += weight.at({o, wc, kh, kw}) *
                       input.at({b, c, ih - spec.padding, iw - spec.padding});
              }
            }
          }
          out.at({b, o, oh, ow}) = acc;
        }
      }
    }
  }
  return out;
}

}  // namespace

FTensor conv2d(const FTensor& input, const FTensor& weight, const FTensor& bias,
               const ConvSpec& spec) {
  return conv_impl(input, weight, bias, spec);
}

FTensor depthwise_conv2d(const FTensor& input, const FTensor& weight, const FTensor& bias,
                         ConvSpec spec) {
  spec.depthwise = true;
  return conv_impl(input, weight, bias, spec);
}

FTensor linear(const FTensor& x, const FTensor& weight, const FTensor& bias) {
  if (x.rank() == 0) throw ShapeError("linear input must have rank >= 1");
  expect_rank(weight, 2, "linear weight");
  const std::size_t in_f = x.shape().back();
  const std::size_t out_f = weight.dim(0);
  if (weight.dim(1) != in_f || bias.size() != out_f) throw ShapeError("linear shape mismatch");
  Shape shape = x.shape();
  shape.back() = out_f;
  FTensor out(shape);
  for (std::size_t r = 0; r < x.size() / in_f; ++r) {
    for (std::size_t o = 0; o < out_f; ++o) {
      double acc = bias[o];
      for (std::size_t i = 0; i < in_f; ++i) acc += x[r * in_f + i] * weight[o * in_f + i];
      out[r * out_f + o] = acc;
    }
  }
  return out;
}

FTensor matmul(const FTensor& a, const FTensor& b) {
  expect_rank(a, 2, "matmul lhs");
  expect_rank(b, 2, "matmul rhs");
  if (a.dim(1) != b.dim(0)) throw ShapeError("matmul inner dimension mismatch");
  const std::size_t m = a.dim(0), inner = a.dim(1), n = b.dim(1);
  FTensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < inner; ++p) acc += a[i * inner + p] * b[p * n + j];
      out[i * n + j] = acc;
    }
  }
  return out;
}

FTensor transpose(const FTensor& a) {
  expect_rank(a, 2, "transpose input");
  FTensor out({a.dim(1), a.dim(0)});
  for (std::size_t i = 0; i < a.dim(0); ++i) {
    for (std::size_t j = 0; j < a.dim(1); ++j) out[j * a.dim(0) + i] = a[i * a.dim(1) + j];
  }
  return out;
}

FTensor layer_norm(const FTensor& x, const FTensor& gamma, const FTensor& beta, double eps) {
  if (x.rank() == 0) throw ShapeError("layer_norm input must have rank >= 1");
  const std::size_t n = x.shape().back();
  if (n == 0 || gamma.size() != n || beta.size() != n) throw ShapeError("layer_norm shape mismatch");
  FTensor out(x.shape());
  for (std::size_t r = 0; r < x.size() / n; ++r) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[r * n + i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x[r * n + i] - mean) * (x[r * n + i] - mean);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t i = 0; i < n; ++i) {
      out[r * n + i] = (x[r * n + i] - mean) * inv * gamma[i] + beta[i];
    }
  }
  return out;
}

std::vector<double> softmax_exact(std::span<const double> x) {
  if (x.empty()) throw ShapeError("softmax of an empty vector");
  const double hi = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += out[i] = std::exp(x[i] - hi);
  for (auto& v : out) v /= total;
  return out;
}

std::vector<double> softmax_series(std::span<const double> x) {
  if (x.empty()) throw ShapeError("softmax of an empty vector");
  std::vector<double> out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += out[i] = 1.0 + x[i] + x[i] * x[i] / 2.0;
  for (auto& v : out) v /= total;
  return out;
}

FTensor softmax(const FTensor& x, SoftmaxKind kind) {
  if (x.rank() == 0) throw ShapeError("softmax input must have rank >= 1");
  const std::size_t n = x.shape().back();
  FTensor out(x.shape());
  if (n == 0) return out;
  for (std::size_t r = 0; r < x.size() / n; ++r) {
    const auto row = x.data().subspan(r * n, n);
    const auto res = kind == SoftmaxKind::kExact ? softmax_exact(row) : softmax_series(row);
    std::copy(res.begin(), res.end(), out.data().begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  return out;
}

double gelu_exact(double x) {
  const double c = std::sqrt(2.0 / std::numbers::pi);
  return 0.5 * x * (1.0 + std::tanh(c * (x + 0.044715 * x * x * x)));
}

double gelu_series(double x, GeluVariant variant) {
  const double a = 102.0 * x / 128.0 + 18.0 * x * x * x / 512.0;
  switch (variant) {
    case GeluVariant::kSeriesLinear:
      return 0.5 * x * (1.0 + a);
    case GeluVariant::kSeriesCubed:
      return 0.5 * x * (1.0 + a + a * a * a);
    case GeluVariant::kSeriesCubedCorrected:
      return 0.5 * x * (1.0 + a - a * a * a / 3.0);
  }
  return 0.0;
}

FTensor gelu_exact(const FTensor& x) {
  FTensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = gelu_exact(x[i]);
  return out;
}

FTensor gelu_series(const FTensor& x, GeluVariant variant) {
  FTensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = gelu_series(x[i], variant);
  return out;
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

FTensor relu(const FTensor& x) {
  FTensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = relu(x[i]);
  return out;
}

std::vector<double> newton_inv_sqrt(double x, double y0, int iters) {
  std::vector<double> ys{y0};
  double y = y0;
  for (int j = 0; j < iters; ++j) {
    y = y - (y * y * y * x - y) / 2.0;
    ys.push_back(y);
  }
  return ys;
}

FTensor attention(const FTensor& q, const FTensor& k, const FTensor& v, std::size_t d_m,
                  SoftmaxKind kind) {
  if (q.shape() != k.shape() || v.rank() != 2 || v.dim(0) != q.dim(0)) {
    throw ShapeError("attention Q/K/V shapes are inconsistent");
  }
  FTensor scores = matmul(q, transpose(k));
  const double inv = 1.0 / std::sqrt(static_cast<double>(d_m));
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] *= inv;
  return matmul(softmax(scores, kind), v);
}

FTensor factorized_attention(const FTensor& q, const FTensor& k, const FTensor& v,
                             std::size_t d_m, SoftmaxKind kind) {
  if (q.shape() != k.shape() || v.rank() != 2 || v.dim(0) != q.dim(0)) {
    throw ShapeError("attention Q/K/V shapes are inconsistent");
  }
  const FTensor context = matmul(softmax(transpose(k), kind), v);
  FTensor qs = q;
  const double inv = 1.0 / std::sqrt(static_cast<double>(d_m));
  for (std::size_t i = 0; i < qs.size(); ++i) qs[i] *= inv;
  return matmul(qs, context);
}

ErrorStats mse(const FTensor& actual, const FTensor& reference) {
  if (actual.shape() != reference.shape()) {
    throw ShapeError("mse shape mismatch: " + shape_string(actual.shape()) + " vs " +
                     shape_string(reference.shape()));
  }
  ErrorStats stats;
  stats.count = actual.size();
  if (stats.count == 0) return stats;
  double total = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = actual[i] - reference[i];
    total += d * d;
    stats.max_abs_err = std::max(stats.max_abs_err, std::fabs(d));
  }
  stats.mse = total / static_cast<double>(stats.count);
  return stats;
}

ErrorStats mse(const QTensor& quantized, const FTensor& reference) {
  return mse(dequantize(quantized), reference);
}

}  // namespace sqvit::ref
