/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "sqvit/scaled_int.hpp"

namespace sqvit {

// Contents of a run configuration file:
//   { "p_bits": 8, "scale_bits": 5, "div_t_max": 5, "newton_iters": 20,
//     "gelu_variant": "series-linear", "seed": 0 }
// Every key is optional; unknown keys are rejected.
struct RunConfig {
  ScaleConfig scale;
  std::uint64_t seed = 0;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace sqvit
