/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <ostream>

#include "sqvit/convert.hpp"
#include "sqvit/scaled_int.hpp"

namespace sqvit {

inline void PrintTo(const ScaledInt& v, std::ostream* os) {
  *os << "(" << v.signed_value() << ", " << v.scale() << ")";
}

}  // namespace sqvit

namespace sqvit::testing {

inline const ScaleConfig kCfg{};

inline ScaledInt si(std::int64_t value, int scale, const ScaleConfig& cfg = kCfg) {
  return ScaledInt::from_signed(value, scale, cfg);
}

inline QTensor qt(Shape shape, std::initializer_list<double> values,
                  const ScaleConfig& cfg = kCfg) {
  return quantize(FTensor(std::move(shape), std::vector<double>(values)), cfg);
}

}  // namespace sqvit::testing
