/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "sqvit/qnn_ops.hpp"

#include <algorithm>
#include <string>

#include "sqvit/errors.hpp"
#include "sqvit/newton.hpp"

namespace sqvit {

namespace {

void expect_rank(const QTensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(what) + " must have rank " + std::to_string(rank) + ", got " +
                     shape_string(t.shape()));
  }
}

ScaledInt constant(std::uint64_t magnitude, int scale, const ScaleConfig& cfg) {
  return handle_overflow(magnitude, scale, cfg);
}

QTensor conv_impl(const QTensor& input, const QTensor& weight, const QTensor& bias,
                  const ConvSpec& spec, const ScaleConfig& cfg, SaturationCounter* sat) {
  spec.validate();
  expect_rank(input, 4, "conv input");
  expect_rank(weight, 4, "conv weight");
  expect_rank(bias, 1, "conv bias");

  const std::size_t batch = input.dim(0);
  const std::size_t in_ch = spec.in_channels;
  const std::size_t out_ch = spec.out_channels;
  const std::size_t k = spec.kernel;
  const std::size_t weight_in = spec.depthwise ? 1 : in_ch;

  if (input.dim(1) != in_ch) throw ShapeError("conv input channels do not match spec");
  if (weight.shape() != Shape{out_ch, weight_in, k, k}) {
    throw ShapeError("conv weight shape " + shape_string(weight.shape()) + " does not match spec");
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

  QTensor out({batch, out_ch, out_h, out_w});
  std::vector<ScaledInt> window;
  std::vector<ScaledInt> channels;
  window.reserve(k * k);
  channels.reserve(in_ch);

  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < out_ch; ++o) {
      const std::size_t c_begin = spec.depthwise ? o / multiplier : 0;
      const std::size_t c_end = spec.depthwise ? c_begin + 1 : in_ch;
      for (std::size_t oh = 0; oh < out_h; ++oh) {
        for (std::size_t ow = 0; ow < out_w; ++ow) {
          channels.clear();
          for (std::size_t c = c_begin; c < c_end; ++c) {
            const std::size_t wc = spec.depthwise ? 0 : c;
            window.clear();
            for (std::size_t kh = 0; kh < k; ++kh) {
              const std::size_t ih = oh * spec.stride + kh;
              if (ih < spec.padding || ih - spec.padding >= h) continue;
              for (std::size_t kw = 0; kw < k; ++kw) {
                const std::size_t iw = ow * spec.stride + kw;
                if (iw < spec.padding || iw - spec.padding >= w) continue;
                window.push_back(scale_mul(weight.at({o, wc, kh, kw}),
                                           input.at({b, c, ih - spec.padding, iw - spec.padding}),
                                           cfg, sat));
              }
            }
            channels.push_back(scaled_sum(window, cfg, sat));
          }
          const ScaledInt summed = scaled_sum(channels, cfg, sat);
          out.at({b, o, oh, ow}) = scale_add(summed, bias[o], cfg, sat);
        }
      }
    }
  }
  return out;
}

ScaledInt dot(std::span<const ScaledInt> a, const QTensor& b, std::size_t b_offset,
              std::size_t b_stride, std::vector<ScaledInt>& scratch, const ScaleConfig& cfg,
              SaturationCounter* sat) {
  scratch.clear();
  for (std::size_t i = 0; i < a.size(); ++i) {
    scratch.push_back(scale_mul(a[i], b[b_offset + i * b_stride], cfg, sat));
  }
  return scaled_sum(scratch, cfg, sat);
}

bool all_equal(std::span<const ScaledInt> xs, const ScaleConfig& cfg) {
  return std::all_of(xs.begin(), xs.end(),
                     [&](const ScaledInt& x) { return scale_sub(x, xs.front(), cfg).is_zero(); });
}

}  // namespace

void ConvSpec::validate() const {
  if (in_channels == 0 || out_channels == 0 || kernel == 0 || stride == 0) {
    throw ShapeError("conv spec dimensions must be positive");
  }
  if (depthwise && out_channels % in_channels != 0) {
    throw ShapeError("depthwise conv needs out_channels to be a multiple of in_channels");
  }
}

ScaledInt default_layer_norm_eps(const ScaleConfig& cfg) {
  return ScaledInt::from_parts(1, false, cfg.scale_max(), cfg);
}

LayerNormParams identity_layer_norm_params(std::size_t n, const ScaleConfig& cfg) {
  LayerNormParams params{QTensor({n}), QTensor({n}), default_layer_norm_eps(cfg)};
  const ScaledInt one = constant(1, 0, cfg);
  for (std::size_t i = 0; i < n; ++i) params.gamma[i] = one;
  return params;
}

QTensor conv2d(const QTensor& input, const QTensor& weight, const QTensor& bias,
               const ConvSpec& spec, const ScaleConfig& cfg, SaturationCounter* sat) {
  return conv_impl(input, weight, bias, spec, cfg, sat);
}

QTensor depthwise_conv2d(const QTensor& input, const QTensor& weight, const QTensor& bias,
                         ConvSpec spec, const ScaleConfig& cfg, SaturationCounter* sat) {
  spec.depthwise = true;
  return conv_impl(input, weight, bias, spec, cfg, sat);
}

QTensor linear(const QTensor& x, const QTensor& weight, const QTensor& bias,
               const ScaleConfig& cfg, SaturationCounter* sat) {
  if (x.rank() == 0) throw ShapeError("linear input must have rank >= 1");
  expect_rank(weight, 2, "linear weight");
  expect_rank(bias, 1, "linear bias");
  const std::size_t in_f = x.shape().back();
  const std::size_t out_f = weight.dim(0);
  if (weight.dim(1) != in_f) throw ShapeError("linear weight inner dimension mismatch");
  if (bias.dim(0) != out_f) throw ShapeError("linear bias length mismatch");

  Shape out_shape = x.shape();
  out_shape.back() = out_f;
  QTensor out(out_shape);
  const std::size_t rows = in_f == 0 ? 0 : x.size() / in_f;
  std::vector<ScaledInt> scratch;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = x.data().subspan(r * in_f, in_f);
    for (std::size_t o = 0; o < out_f; ++o) {
      const ScaledInt acc = dot(row, weight, o * in_f, 1, scratch, cfg, sat);
      out[r * out_f + o] = scale_add(acc, bias[o], cfg, sat);
    }
  }
  return out;
}

QTensor matmul(const QTensor& a, const QTensor& b, const ScaleConfig& cfg,
               SaturationCounter* sat) {
  expect_rank(a, 2, "matmul lhs");
  expect_rank(b, 2, "matmul rhs");
  const std::size_t m = a.dim(0);
  const std::size_t inner = a.dim(1);
  const std::size_t n = b.dim(1);
  if (b.dim(0) != inner) {
    throw ShapeError("matmul inner dimension mismatch: " + shape_string(a.shape()) + " x " +
                     shape_string(b.shape()));
  }
  QTensor out({m, n});
  std::vector<ScaledInt> scratch;
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = a.data().subspan(i * inner, inner);
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = dot(row, b, j, n, scratch, cfg, sat);
  }
  return out;
}

QTensor transpose(const QTensor& a) {
  expect_rank(a, 2, "transpose input");
  const std::size_t rows = a.dim(0);
  const std::size_t cols = a.dim(1);
  QTensor out({cols, rows});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j * rows + i] = a[i * cols + j];
  }
  return out;
}

QTensor layer_norm(const QTensor& x, const LayerNormParams& params, const ScaleConfig& cfg,
                   SaturationCounter* sat) {
  if (x.rank() == 0) throw ShapeError("layer_norm input must have rank >= 1");
  const std::size_t n = x.shape().back();
  if (n == 0) throw ShapeError("layer_norm over an empty axis");
  if (params.gamma.shape() != Shape{n} || params.beta.shape() != Shape{n}) {
    throw ShapeError("layer_norm gamma/beta must have shape [" + std::to_string(n) + "]");
  }

  const ScaledInt count = constant(n, 0, cfg);
  const ScaledInt seed = default_newton_seed(cfg);
  QTensor out(x.shape());
  std::vector<ScaledInt> dev(n);
  std::vector<ScaledInt> sq(n);

  for (std::size_t r = 0; r < x.size() / n; ++r) {
    const auto row = x.data().subspan(r * n, n);
    const auto dst = out.data().subspan(r * n, n);

    const ScaledInt mean = scale_div(scaled_sum(row, cfg, sat), count, cfg, sat);
    bool degenerate = all_equal(row, cfg);
    if (!degenerate) {
      for (std::size_t i = 0; i < n; ++i) dev[i] = scale_sub(row[i], mean, cfg, sat);
      degenerate = std::all_of(dev.begin(), dev.end(), [](const ScaledInt& d) { return d.is_zero(); });
    }
    if (degenerate) {
      std::copy(params.beta.data().begin(), params.beta.data().end(), dst.begin());
      continue;
    }

    for (std::size_t i = 0; i < n; ++i) sq[i] = scale_mul(dev[i], dev[i], cfg, sat);
    const ScaledInt var = scale_div(scaled_sum(sq, cfg, sat), count, cfg, sat);
    const ScaledInt denom = scale_add(var, params.eps, cfg, sat);
    const ScaledInt inv = newton_inv_sqrt(denom, seed, cfg.newton_iters, cfg, sat).value;

    for (std::size_t i = 0; i < n; ++i) {
      const ScaledInt normed = scale_mul(dev[i], inv, cfg, sat);
      dst[i] = scale_add(scale_mul(normed, params.gamma[i], cfg, sat), params.beta[i], cfg, sat);
    }
  }
  return out;
}

std::vector<ScaledInt> softmax(std::span<const ScaledInt> x, const ScaleConfig& cfg,
                               SaturationCounter* sat) {
  if (x.empty()) throw ShapeError("softmax of an empty vector");
  const ScaledInt one = constant(1, 0, cfg);

  std::vector<ScaledInt> numerators;
  numerators.reserve(x.size());
  for (const auto& xi : x) {
    const ScaledInt half_sq = scale_halve(scale_mul(xi, xi, cfg, sat), cfg, sat);
    const ScaledInt terms[] = {one, xi, half_sq};
    numerators.push_back(scaled_sum(terms, cfg, sat));
  }
  const ScaledInt denominator = scaled_sum(numerators, cfg, sat);

  std::vector<ScaledInt> out;
  out.reserve(x.size());
  for (const auto& num : numerators) out.push_back(scale_div(num, denominator, cfg, sat));
  return out;
}

QTensor softmax(const QTensor& x, const ScaleConfig& cfg, SaturationCounter* sat) {
  if (x.rank() == 0) throw ShapeError("softmax input must have rank >= 1");
  const std::size_t n = x.shape().back();
  QTensor out(x.shape());
  if (n == 0) return out;
  for (std::size_t r = 0; r < x.size() / n; ++r) {
    const auto row = softmax(x.data().subspan(r * n, n), cfg, sat);
    std::copy(row.begin(), row.end(), out.data().begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  return out;
}

ScaledInt gelu(const ScaledInt& x, GeluVariant variant, const ScaleConfig& cfg,
               SaturationCounter* sat) {
  if (x.is_zero()) return {};
  const ScaledInt one = constant(1, 0, cfg);
  // A = 102x/2^7 + 18x^3/2^9
  const ScaledInt linear_coef = constant(102, 7, cfg);
  const ScaledInt cubic_coef = constant(18, 9, cfg);

  const ScaledInt x3 = scale_mul(scale_mul(x, x, cfg, sat), x, cfg, sat);
  const ScaledInt a = scale_add(scale_mul(linear_coef, x, cfg, sat),
                                scale_mul(cubic_coef, x3, cfg, sat), cfg, sat);

  ScaledInt inner;
  switch (variant) {
    case GeluVariant::kSeriesLinear:
      inner = scale_add(one, a, cfg, sat);
      break;
    case GeluVariant::kSeriesCubed: {
      const ScaledInt a3 = scale_mul(scale_mul(a, a, cfg, sat), a, cfg, sat);
      const ScaledInt terms[] = {one, a, a3};
      inner = scaled_sum(terms, cfg, sat);
      break;
    }
    case GeluVariant::kSeriesCubedCorrected: {
      const ScaledInt a3 = scale_mul(scale_mul(a, a, cfg, sat), a, cfg, sat);
      const ScaledInt third = scale_div(a3, constant(3, 0, cfg), cfg, sat);
      const ScaledInt terms[] = {one, a, third.negated()};
      inner = scaled_sum(terms, cfg, sat);
      break;
    }
  }
  return scale_mul(scale_halve(x, cfg, sat), inner, cfg, sat);
}

ScaledInt gelu(const ScaledInt& x, const ScaleConfig& cfg, SaturationCounter* sat) {
  return gelu(x, cfg.gelu_variant, cfg, sat);
}

QTensor gelu(const QTensor& x, const ScaleConfig& cfg, SaturationCounter* sat) {
  QTensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = gelu(x[i], cfg, sat);
  return out;
}

QTensor relu(const QTensor& x) {
  QTensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = relu(x[i]);
  return out;
}

QTensor scale_tensor(const QTensor& x, const ScaledInt& s, const ScaleConfig& cfg,
                     SaturationCounter* sat) {
  QTensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale_mul(x[i], s, cfg, sat);
  return out;
}

ScaledInt inv_sqrt_dim(std::size_t d_m, const ScaleConfig& cfg, SaturationCounter* sat) {
  if (d_m == 0) throw DomainError("attention dimension d_m must be >= 1");
  return newton_inv_sqrt(constant(d_m, 0, cfg), default_newton_seed(cfg), cfg.newton_iters, cfg,
                         sat)
      .value;
}

QTensor attention(const QTensor& q, const QTensor& k, const QTensor& v, std::size_t d_m,
                  const ScaleConfig& cfg, SaturationCounter* sat) {
  return attention(q, k, v, inv_sqrt_dim(d_m, cfg, sat), cfg, sat);
}

QTensor attention(const QTensor& q, const QTensor& k, const QTensor& v,
                  const ScaledInt& inv_sqrt_dm, const ScaleConfig& cfg, SaturationCounter* sat) {
  expect_rank(q, 2, "attention Q");
  expect_rank(k, 2, "attention K");
  expect_rank(v, 2, "attention V");
  if (q.shape() != k.shape() || v.dim(0) != q.dim(0)) {
    throw ShapeError("attention Q/K/V shapes are inconsistent");
  }
  const QTensor scores = scale_tensor(matmul(q, transpose(k), cfg, sat), inv_sqrt_dm, cfg, sat);
  return matmul(softmax(scores, cfg, sat), v, cfg, sat);
}

QTensor factorized_attention(const QTensor& q, const QTensor& k, const QTensor& v,
                             std::size_t d_m, const ScaleConfig& cfg, SaturationCounter* sat) {
  return factorized_attention(q, k, v, inv_sqrt_dim(d_m, cfg, sat), cfg, sat);
}

QTensor factorized_attention(const QTensor& q, const QTensor& k, const QTensor& v,
                             const ScaledInt& inv_sqrt_dm, const ScaleConfig& cfg,
                             SaturationCounter* sat) {
  expect_rank(q, 2, "attention Q");
  expect_rank(k, 2, "attention K");
  expect_rank(v, 2, "attention V");
  if (q.shape() != k.shape() || v.dim(0) != q.dim(0)) {
    throw ShapeError("attention Q/K/V shapes are inconsistent");
  }
  // softmax over tokens for every channel of K, already in [d, T] layout.
  const QTensor k_soft_t = softmax(transpose(k), cfg, sat);
  const QTensor context = matmul(k_soft_t, v, cfg, sat);
  return matmul(scale_tensor(q, inv_sqrt_dm, cfg, sat), context, cfg, sat);
}

}  // namespace sqvit
