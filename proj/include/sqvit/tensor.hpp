/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqvit/errors.hpp"
#include "sqvit/scaled_int.hpp"

namespace sqvit {

using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape);

// Dense row-major tensor.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape) : shape_(std::move(shape)), data_(element_count(shape_)) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != element_count(shape_)) {
      throw ShapeError("tensor data size " + std::to_string(data_.size()) +
                       " does not match shape " + shape_string(shape_));
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }
  const T& at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t offset(std::initializer_list<std::size_t> index) const {
    if (index.size() != shape_.size()) throw ShapeError("index rank mismatch");
    std::size_t off = 0;
    std::size_t axis = 0;
    for (auto i : index) {
      if (i >= shape_[axis]) throw ShapeError("index out of bounds");
      off = off * shape_[axis] + i;
      ++axis;
    }
    return off;
  }

  Shape shape_;
  std::vector<T> data_;
};

using QTensor = Tensor<ScaledInt>;

}  // namespace sqvit
