/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// Tensor files:
//   { "shape": [...], "kind": "f64", "data": [1.5, ...] }
//   { "shape": [...], "kind": "scaled", "data": [[signed_int, scale], ...] }

#pragma once

#include <filesystem>
#include <variant>

#include <json.hpp>

#include "sqvit/convert.hpp"
#include "sqvit/scaled_int.hpp"
#include "sqvit/tensor.hpp"

namespace sqvit {

using AnyTensor = std::variant<FTensor, QTensor>;

nlohmann::json to_json(const FTensor& t);
nlohmann::json to_json(const QTensor& t);
// Throws ShapeError for malformed documents and RangeError for scaled
// elements outside the configured format.
AnyTensor tensor_from_json(const nlohmann::json& j, const ScaleConfig& cfg);

AnyTensor load_tensor(const std::filesystem::path& path, const ScaleConfig& cfg);
void save_tensor(const std::filesystem::path& path, const FTensor& t);
void save_tensor(const std::filesystem::path& path, const QTensor& t);

}  // namespace sqvit
