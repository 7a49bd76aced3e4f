/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// Boundary conversions between real numbers and ScaledInt. Nothing in the
// quantized operator path includes this header.

#pragma once

#include "sqvit/scaled_int.hpp"
#include "sqvit/tensor.hpp"

namespace sqvit {

using FTensor = Tensor<double>;

// Maximum-precision encoding: the largest scale whose rounded magnitude still
// fits P bits, rounding half to even. Throws RangeError when |value| exceeds
// (2^P - 1) * 2^-scale_min or is not finite.
ScaledInt quantize(double value, const ScaleConfig& cfg);

// Exact: (+/-) magnitude * 2^-scale.
double dequantize(const ScaledInt& q);

QTensor quantize(const FTensor& t, const ScaleConfig& cfg);
FTensor dequantize(const QTensor& t);

}  // namespace sqvit
