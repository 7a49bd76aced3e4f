/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// Power-of-two scaled integers and their arithmetic.
//
// A ScaledInt stores a sign, a P-bit magnitude and a small signed scale S; the
// represented value is (+/-) magnitude / 2^S. Every operator in the quantized
// path is built from the primitives declared here. Only integer add, subtract,
// multiply, compare and shift are used; this translation unit and its callers
// are compiled without access to floating point registers.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace sqvit {

enum class GeluVariant {
  kSeriesCubed,           // 0.5x(1 + A + A^3)
  kSeriesCubedCorrected,  // 0.5x(1 + A - A^3/3)
  kSeriesLinear,          // 0.5x(1 + A)
};

std::string_view to_string(GeluVariant variant);
GeluVariant parse_gelu_variant(std::string_view name);

struct ScaleConfig {
  int p_bits = 8;
  int scale_bits = 5;
  int div_t_max = 5;
  int newton_iters = 20;
  GeluVariant gelu_variant = GeluVariant::kSeriesLinear;

  // Throws ConfigError. p_bits is limited to 16 so that every aligned sum
  // fits the 64-bit working registers.
  void validate() const;

  std::uint32_t max_magnitude() const { return (std::uint32_t{1} << p_bits) - 1; }
  int scale_min() const { return -(1 << (scale_bits - 1)); }
  int scale_max() const { return (1 << (scale_bits - 1)) - 1; }
  int bits_per_element() const { return p_bits + scale_bits; }

  // Format for short-lived intermediates: same magnitude width, wider scale
  // field.
  ScaleConfig temporary() const;

  friend bool operator==(const ScaleConfig&, const ScaleConfig&) = default;
};

// Caller-owned tally of results whose scale fell below scale_min and had to be
// clamped with a saturated magnitude.
struct SaturationCounter {
  std::uint64_t count = 0;
  void record() { ++count; }
};

class ScaledInt {
 public:
  constexpr ScaledInt() = default;

  // Validating constructors; throw RangeError.
  static ScaledInt from_parts(std::uint32_t magnitude, bool negative, int scale,
                              const ScaleConfig& cfg);
  static ScaledInt from_signed(std::int64_t value, int scale, const ScaleConfig& cfg);

  std::uint32_t magnitude() const { return magnitude_; }
  bool negative() const { return negative_; }
  int scale() const { return scale_; }
  bool is_zero() const { return magnitude_ == 0; }
  std::int64_t signed_value() const {
    return negative_ ? -static_cast<std::int64_t>(magnitude_) : magnitude_;
  }

  ScaledInt negated() const;
  ScaledInt abs() const { return ScaledInt(magnitude_, false, scale_); }

  friend bool operator==(const ScaledInt&, const ScaledInt&) = default;

 private:
  friend struct ScaledIntAccess;
  constexpr ScaledInt(std::uint32_t magnitude, bool negative, int scale)
      : magnitude_(magnitude), negative_(negative), scale_(scale) {}

  std::uint32_t magnitude_ = 0;
  bool negative_ = false;
  int scale_ = 0;
};

// Keeps the P most significant bits of raw_magnitude and lowers the scale by
// the number of dropped bits, then applies the scale-range rules: above
// scale_max the magnitude is shifted right (possibly to zero); below scale_min
// it is shifted left when it fits, otherwise saturated at 2^P - 1 and counted.
ScaledInt handle_overflow(std::uint64_t raw_magnitude, int raw_scale, const ScaleConfig& cfg,
                          SaturationCounter* sat = nullptr);
ScaledInt handle_overflow(std::uint64_t raw_magnitude, bool negative, int raw_scale,
                          const ScaleConfig& cfg, SaturationCounter* sat = nullptr);

ScaledInt scale_mul(const ScaledInt& a, const ScaledInt& b, const ScaleConfig& cfg,
                    SaturationCounter* sat = nullptr);
ScaledInt scale_add(const ScaledInt& a, const ScaledInt& b, const ScaleConfig& cfg,
                    SaturationCounter* sat = nullptr);
ScaledInt scale_sub(const ScaledInt& a, const ScaledInt& b, const ScaleConfig& cfg,
                    SaturationCounter* sat = nullptr);

/// Recursive scaled long division on magnitudes; the sign is applied
/// afterwards. Each extraction folds floor(dividend / divisor) into a P-bit
/// accumulator. When the dividend drops below the divisor it is shifted up to
/// fill the 2P-bit temporary and the shift is added to its scale. Stops on a
/// zero remainder, after div_t_max extractions, or once the accumulator
/// overflows P bits. Throws DivisionByZero.
ScaledInt scale_div(const ScaledInt& a, const ScaledInt& b, const ScaleConfig& cfg,
                    SaturationCounter* sat = nullptr);

// Exact multiplication / division by 2 through the scale field.
ScaledInt scale_halve(const ScaledInt& a, const ScaleConfig& cfg, SaturationCounter* sat = nullptr);
ScaledInt scale_double(const ScaledInt& a, const ScaleConfig& cfg,
                       SaturationCounter* sat = nullptr);

ScaledInt relu(const ScaledInt& x);

// Signed 2P-bit summation register. Terms are aligned to the register scale
// (initially the caller's maximum term scale); when the register would exceed
// 2P bits it keeps the 2P most significant bits and lowers its scale.
class Accumulator {
 public:
  Accumulator(const ScaleConfig& cfg, int align_scale);

  void add(const ScaledInt& term);
  ScaledInt result(SaturationCounter* sat = nullptr) const;

 private:
  void coarsen(int bits);

  ScaleConfig cfg_;
  std::uint64_t magnitude_ = 0;
  bool negative_ = false;
  int scale_ = 0;
  int register_bits_ = 0;
};

// Max scale among the non-zero terms, or 0 if all are zero.
int max_scale(std::span<const ScaledInt> terms);

// Sum aligned to max_scale(terms), accumulated left to right.
ScaledInt scaled_sum(std::span<const ScaledInt> terms, const ScaleConfig& cfg,
                     SaturationCounter* sat = nullptr);

}  // namespace sqvit
