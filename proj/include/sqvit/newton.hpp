/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <vector>

#include "sqvit/scaled_int.hpp"

namespace sqvit {

// Iterates of one inverse-square-root run. entries[0] is the seed; entries[j]
// is Y_j after j iterations.
struct NewtonTrace {
  ScaledInt input;
  int iters = 0;
  std::vector<ScaledInt> entries;
};

struct NewtonResult {
  ScaledInt value;
  NewtonTrace trace;
};

// 1 / 2^6 = 0.015625, clamped into the configured scale range.
ScaledInt default_newton_seed(const ScaleConfig& cfg);

// Quantized Newton iteration y <- (3y - x*y^3) / 2 for 1/sqrt(x).
//
// The iterate lives at a working scale W, initially one above the seed's
// scale (where the first halving lands). Each step computes x*Y^3 with
// overflow-handled products, truncates it to W, subtracts it from the integer
// 3Y, halves through the scale and rounds back to W half-up. Overflow keeps the
// P most significant bits and lowers W accordingly; a step that makes no upward progress refines W by one bit
// when the doubled magnitude still fits.
//
// Throws DomainError for non-positive x or seed, or when the iterate leaves
// the convergence region (seed too large for x).
NewtonResult newton_inv_sqrt(const ScaledInt& x, const ScaledInt& y0, int iters,
                             const ScaleConfig& cfg, SaturationCounter* sat = nullptr);

}  // namespace sqvit
