/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <stdexcept>
#include <string>

namespace sqvit {

// Value outside the representable range of the configured format.
class RangeError : public std::out_of_range {
 public:
  explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

class DivisionByZero : public std::domain_error {
 public:
  explicit DivisionByZero(const std::string& what) : std::domain_error(what) {}
};

// Operand outside an operator's mathematical domain (e.g. inverse sqrt of a
// non-positive value).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace sqvit
