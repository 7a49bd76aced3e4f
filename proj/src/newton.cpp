/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "sqvit/newton.hpp"

#include <algorithm>
#include <bit>

#include "sqvit/errors.hpp"

namespace sqvit {

ScaledInt default_newton_seed(const ScaleConfig& cfg) {
  return ScaledInt::from_parts(1, false, std::min(6, cfg.scale_max()), cfg);
}

NewtonResult newton_inv_sqrt(const ScaledInt& x, const ScaledInt& y0, int iters,
                             const ScaleConfig& cfg, SaturationCounter* sat) {
  if (x.is_zero() || x.negative()) throw DomainError("inverse sqrt needs a positive input");
  if (y0.is_zero() || y0.negative()) throw DomainError("inverse sqrt needs a positive seed");
  if (iters < 0) throw DomainError("negative iteration count");

  const ScaleConfig tmp = cfg.temporary();
  const std::uint64_t max_mag = cfg.max_magnitude();

  // Working representation: y / 2^w with y < 2^P.
  std::uint64_t y = std::uint64_t{y0.magnitude()} << 1;
  int w = y0.scale() + 1;
  if (y > max_mag || w > cfg.scale_max()) {
    y = y0.magnitude();
    w = y0.scale();
  }

  NewtonResult result;
  result.trace.input = x;
  result.trace.iters = iters;
  result.trace.entries.reserve(static_cast<std::size_t>(iters) + 1);
  result.trace.entries.push_back(y0);
  result.value = y0;

  for (int j = 0; j < iters; ++j) {
    const ScaledInt yt = ScaledInt::from_parts(static_cast<std::uint32_t>(y), false, w, tmp);
    const ScaledInt cube = scale_mul(scale_mul(yt, yt, tmp), yt, tmp);
    const ScaledInt xy3 = scale_mul(cube, x, tmp);

    // x*Y^3 truncated to the working scale.
    std::uint64_t sub = 0;
    if (!xy3.is_zero()) {
      if (xy3.scale() >= w) {
        const int shift = xy3.scale() - w;
        sub = shift >= 64 ? 0 : std::uint64_t{xy3.magnitude()} >> shift;
      } else {
        const int shift = w - xy3.scale();
        if (shift > cfg.p_bits + 2) throw DomainError("inverse sqrt iterate diverged");
        sub = std::uint64_t{xy3.magnitude()} << shift;
      }
    }

    const std::uint64_t triple = 3 * y;
    if (sub >= triple) throw DomainError("inverse sqrt iterate diverged");

    // (3Y - xY^3) at scale w + 1, requantized to w rounding half up.
    std::uint64_t next = (triple - sub + 1) >> 1;
    if (next > max_mag) {
      const int k = std::bit_width(next) - cfg.p_bits;
      next >>= k;
      w -= k;
    } else if (next <= y && 2 * next <= max_mag && w < cfg.scale_max()) {
      next <<= 1;
      ++w;
    }

    const ScaledInt stored = handle_overflow(next, false, w, cfg, sat);
    y = stored.magnitude();
    w = stored.scale();
    result.trace.entries.push_back(stored);
    result.value = stored;
  }
  return result;
}

}  // namespace sqvit
