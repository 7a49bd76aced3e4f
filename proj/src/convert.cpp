/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "sqvit/convert.hpp"

#include <cmath>
#include <sstream>

#include "sqvit/errors.hpp"

namespace sqvit {

ScaledInt quantize(double value, const ScaleConfig& cfg) {
  if (!std::isfinite(value)) throw RangeError("cannot quantize a non-finite value");
  const double mag = std::fabs(value);
  const double max_mag = static_cast<double>(cfg.max_magnitude());
  const double limit = std::ldexp(max_mag, -cfg.scale_min());
  if (mag > limit) {
    std::ostringstream os;
    os << "value " << value << " exceeds representable magnitude " << limit;
    throw RangeError(os.str());
  }

  for (int s = cfg.scale_max(); s >= cfg.scale_min(); --s) {
    const double m = std::nearbyint(std::ldexp(mag, s));
    if (m <= max_mag) {
      if (m == 0.0) return {};
      return ScaledInt::from_parts(static_cast<std::uint32_t>(m), value < 0, s, cfg);
    }
  }
  // mag <= limit guarantees the scale_min candidate fits.
  throw RangeError("unreachable quantize range");
}

double dequantize(const ScaledInt& q) {
  const double m = std::ldexp(static_cast<double>(q.magnitude()), -q.scale());
  return q.negative() ? -m : m;
}

QTensor quantize(const FTensor& t, const ScaleConfig& cfg) {
  QTensor out(t.shape());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = quantize(t[i], cfg);
  return out;
}

FTensor dequantize(const QTensor& t) {
  FTensor out(t.shape());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = dequantize(t[i]);
  return out;
}

}  // namespace sqvit
