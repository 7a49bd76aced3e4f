/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "sqvit/scaled_int.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "sqvit/errors.hpp"

namespace sqvit {

struct ScaledIntAccess {
  static constexpr ScaledInt make(std::uint32_t magnitude, bool negative, int scale) {
    return ScaledInt(magnitude, negative, scale);
  }
};

namespace {

using u128 = unsigned __int128;

ScaledInt make(std::uint32_t magnitude, bool negative, int scale) {
  if (magnitude == 0) return {};
  return ScaledIntAccess::make(magnitude, negative, scale);
}

int bit_width128(u128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 64 + std::bit_width(hi);
  return std::bit_width(static_cast<std::uint64_t>(v));
}

struct SignedRaw {
  std::uint64_t magnitude = 0;
  bool negative = false;
  int scale = 0;
};

// Both operands aligned to the larger scale and added as signed values. When
// the scale gap exceeds 2P + 8 the finer operand sits entirely below the
// truncation point of any result, so it is replaced by a sticky unit at that
// depth; the P most significant bits and the final scale are unchanged.
SignedRaw aligned_sum(const ScaledInt& a, const ScaledInt& b, int p_bits) {
  if (a.is_zero()) return {b.magnitude(), b.negative(), b.scale()};
  if (b.is_zero()) return {a.magnitude(), a.negative(), a.scale()};

  const ScaledInt& fine = a.scale() >= b.scale() ? a : b;
  const ScaledInt& coarse = a.scale() >= b.scale() ? b : a;
  const int gap = fine.scale() - coarse.scale();
  const int cap = 2 * p_bits + 8;

  std::uint64_t coarse_mag = 0;
  std::uint64_t fine_mag = 0;
  int scale = 0;
  if (gap <= cap) {
    coarse_mag = std::uint64_t{coarse.magnitude()} << gap;
    fine_mag = fine.magnitude();
    scale = fine.scale();
  } else {
    coarse_mag = std::uint64_t{coarse.magnitude()} << cap;
    fine_mag = 1;
    scale = coarse.scale() + cap;
  }

  const auto c = static_cast<std::int64_t>(coarse_mag);
  const auto f = static_cast<std::int64_t>(fine_mag);
  const std::int64_t sum = (coarse.negative() ? -c : c) + (fine.negative() ? -f : f);
  if (sum < 0) return {static_cast<std::uint64_t>(-sum), true, scale};
  return {static_cast<std::uint64_t>(sum), false, scale};
}

// Overflow handling on a 128-bit value: keep p_bits MSBs.
std::uint64_t keep_msbs(u128 raw, int p_bits, int& scale) {
  const int width = bit_width128(raw);
  if (width > p_bits) {
    const int k = width - p_bits;
    raw >>= k;
    scale -= k;
  }
  return static_cast<std::uint64_t>(raw);
}

}  // namespace

std::string_view to_string(GeluVariant variant) {
  switch (variant) {
    case GeluVariant::kSeriesCubed:
      return "series-cubed";
    case GeluVariant::kSeriesCubedCorrected:
      return "series-cubed-corrected";
    case GeluVariant::kSeriesLinear:
      return "series-linear";
  }
  return "unknown";
}

GeluVariant parse_gelu_variant(std::string_view name) {
  for (auto v : {GeluVariant::kSeriesCubed, GeluVariant::kSeriesCubedCorrected,
                 GeluVariant::kSeriesLinear}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown gelu variant '" + std::string(name) + "'");
}

void ScaleConfig::validate() const {
  if (p_bits < 2 || p_bits > 16) throw ConfigError("p_bits must be in [2, 16]");
  if (scale_bits < 2 || scale_bits > 12) throw ConfigError("scale_bits must be in [2, 12]");
  if (div_t_max < 1) throw ConfigError("div_t_max must be >= 1");
  if (newton_iters < 1) throw ConfigError("newton_iters must be >= 1");
}

ScaleConfig ScaleConfig::temporary() const {
  ScaleConfig wide = *this;
  wide.scale_bits = scale_bits + 2;
  return wide;
}

ScaledInt ScaledInt::from_parts(std::uint32_t magnitude, bool negative, int scale,
                                const ScaleConfig& cfg) {
  if (magnitude > cfg.max_magnitude()) {
    throw RangeError("magnitude " + std::to_string(magnitude) + " exceeds 2^" +
                     std::to_string(cfg.p_bits) + " - 1");
  }
  if (magnitude == 0) return {};
  if (scale < cfg.scale_min() || scale > cfg.scale_max()) {
    throw RangeError("scale " + std::to_string(scale) + " outside [" +
                     std::to_string(cfg.scale_min()) + ", " + std::to_string(cfg.scale_max()) +
                     "]");
  }
  return ScaledInt(magnitude, negative, scale);
}

ScaledInt ScaledInt::from_signed(std::int64_t value, int scale, const ScaleConfig& cfg) {
  const bool negative = value < 0;
  const std::uint64_t magnitude = negative ? 0 - static_cast<std::uint64_t>(value)
                                           : static_cast<std::uint64_t>(value);
  if (magnitude > cfg.max_magnitude()) {
    throw RangeError("integer " + std::to_string(value) + " exceeds P-bit magnitude");
  }
  return from_parts(static_cast<std::uint32_t>(magnitude), negative, scale, cfg);
}

ScaledInt ScaledInt::negated() const {
  if (is_zero()) return {};
  return ScaledInt(magnitude_, !negative_, scale_);
}

ScaledInt handle_overflow(std::uint64_t raw_magnitude, int raw_scale, const ScaleConfig& cfg,
                          SaturationCounter* sat) {
  return handle_overflow(raw_magnitude, false, raw_scale, cfg, sat);
}

ScaledInt handle_overflow(std::uint64_t raw_magnitude, bool negative, int raw_scale,
                          const ScaleConfig& cfg, SaturationCounter* sat) {
  if (raw_magnitude == 0) return {};
  const std::uint64_t max_mag = cfg.max_magnitude();
  std::uint64_t m = raw_magnitude;
  int s = raw_scale;

  const int width = std::bit_width(m);
  if (width > cfg.p_bits) {
    const int k = width - cfg.p_bits;
    m >>= k;
    s -= k;
  }

  if (s > cfg.scale_max()) {
    const int excess = s - cfg.scale_max();
    m = excess >= 64 ? 0 : m >> excess;
    s = cfg.scale_max();
  } else if (s < cfg.scale_min()) {
    const int deficit = cfg.scale_min() - s;
    if (deficit < cfg.p_bits && (m << deficit) <= max_mag) {
      m <<= deficit;
    } else {
      m = max_mag;
      if (sat != nullptr) sat->record();
    }
    s = cfg.scale_min();
  }
  return make(static_cast<std::uint32_t>(m), negative, s);
}

ScaledInt scale_mul(const ScaledInt& a, const ScaledInt& b, const ScaleConfig& cfg,
                    SaturationCounter* sat) {
  if (a.is_zero() || b.is_zero()) return {};
  const std::uint64_t raw = std::uint64_t{a.magnitude()} * b.magnitude();
  return handle_overflow(raw, a.negative() != b.negative(), a.scale() + b.scale(), cfg, sat);
}

ScaledInt scale_add(const ScaledInt& a, const ScaledInt& b, const ScaleConfig& cfg,
                    SaturationCounter* sat) {
  const SignedRaw sum = aligned_sum(a, b, cfg.p_bits);
  return handle_overflow(sum.magnitude, sum.negative, sum.scale, cfg, sat);
}

ScaledInt scale_sub(const ScaledInt& a, const ScaledInt& b, const ScaleConfig& cfg,
                    SaturationCounter* sat) {
  return scale_add(a, b.negated(), cfg, sat);
}

ScaledInt scale_div(const ScaledInt& a, const ScaledInt& b, const ScaleConfig& cfg,
                    SaturationCounter* sat) {
  if (b.is_zero()) throw DivisionByZero("scale_div: zero divisor");
  if (a.is_zero()) return {};

  const bool negative = a.negative() != b.negative();
  const std::uint64_t divisor = b.magnitude();
  const std::uint64_t temp_limit = (std::uint64_t{1} << (2 * cfg.p_bits)) - 1;
  const u128 max_mag = cfg.max_magnitude();

  std::uint64_t dividend = a.magnitude();
  int scale = a.scale() - b.scale();

  u128 sum = 0;
  int sum_scale = 0;
  int extractions = 0;

  // Adds q / 2^q_scale to the running quotient; returns true when the
  // accumulator no longer fits P bits.
  auto fold = [&](std::uint64_t q, int q_scale) {
    if (sum == 0) {
      sum = q;
      sum_scale = q_scale;
    } else if (q_scale >= sum_scale) {
      sum = (sum << (q_scale - sum_scale)) + q;
      sum_scale = q_scale;
    } else {
      sum += u128{q} << (sum_scale - q_scale);
    }
    return sum > max_mag;
  };

  while (extractions < cfg.div_t_max) {
    if (dividend > divisor) {
      const std::uint64_t q = dividend / divisor;
      const std::uint64_t rem = dividend % divisor;
      ++extractions;
      if (fold(q, scale) || rem == 0) break;
      dividend = rem;
    } else if (dividend < divisor) {
      int shift = 0;
      while ((dividend << (shift + 1)) <= temp_limit) ++shift;
      dividend <<= shift;
      scale += shift;
    } else {
      fold(1, scale);
      break;
    }
  }

  const std::uint64_t m = keep_msbs(sum, cfg.p_bits, sum_scale);
  return handle_overflow(m, negative, sum_scale, cfg, sat);
}

ScaledInt scale_halve(const ScaledInt& a, const ScaleConfig& cfg, SaturationCounter* sat) {
  return handle_overflow(a.magnitude(), a.negative(), a.scale() + 1, cfg, sat);
}

ScaledInt scale_double(const ScaledInt& a, const ScaleConfig& cfg, SaturationCounter* sat) {
  return handle_overflow(a.magnitude(), a.negative(), a.scale() - 1, cfg, sat);
}

ScaledInt relu(const ScaledInt& x) { return x.negative() ? ScaledInt{} : x; }

Accumulator::Accumulator(const ScaleConfig& cfg, int align_scale)
    : cfg_(cfg), scale_(align_scale), register_bits_(2 * cfg.p_bits) {}

void Accumulator::coarsen(int bits) {
  magnitude_ = bits >= 64 ? 0 : magnitude_ >> bits;
  scale_ -= bits;
  if (magnitude_ == 0) negative_ = false;
}

void Accumulator::add(const ScaledInt& term) {
  if (term.is_zero()) return;
  const std::uint64_t m = term.magnitude();
  std::uint64_t aligned = 0;
  if (term.scale() <= scale_) {
    const int needed = std::bit_width(m) + (scale_ - term.scale());
    if (needed > register_bits_) coarsen(needed - register_bits_);
    aligned = m << (scale_ - term.scale());
  } else {
    const int shift = term.scale() - scale_;
    aligned = shift >= 64 ? 0 : m >> shift;
  }

  if (magnitude_ == 0) {
    magnitude_ = aligned;
    negative_ = term.negative();
  } else if (negative_ == term.negative()) {
    magnitude_ += aligned;
  } else if (magnitude_ >= aligned) {
    magnitude_ -= aligned;
  } else {
    magnitude_ = aligned - magnitude_;
    negative_ = !negative_;
  }
  if (magnitude_ == 0) negative_ = false;

  const int width = std::bit_width(magnitude_);
  if (width > register_bits_) coarsen(width - register_bits_);
}

ScaledInt Accumulator::result(SaturationCounter* sat) const {
  return handle_overflow(magnitude_, negative_, scale_, cfg_, sat);
}

int max_scale(std::span<const ScaledInt> terms) {
  bool any = false;
  int best = 0;
  for (const auto& t : terms) {
    if (t.is_zero()) continue;
    best = any ? std::max(best, t.scale()) : t.scale();
    any = true;
  }
  return best;
}

ScaledInt scaled_sum(std::span<const ScaledInt> terms, const ScaleConfig& cfg,
                     SaturationCounter* sat) {
  Accumulator acc(cfg, max_scale(terms));
  for (const auto& t : terms) acc.add(t);
  return acc.result(sat);
}

}  // namespace sqvit
