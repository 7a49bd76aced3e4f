/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "sqvit/config_io.hpp"

#include <fstream>

#include "sqvit/errors.hpp"

namespace sqvit {

namespace {

int read_int(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("config key '") + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "p_bits") {
      cfg.scale.p_bits = read_int(j, "p_bits");
    } else if (key == "scale_bits") {
      cfg.scale.scale_bits = read_int(j, "scale_bits");
    } else if (key == "div_t_max") {
      cfg.scale.div_t_max = read_int(j, "div_t_max");
    } else if (key == "newton_iters") {
      cfg.scale.newton_iters = read_int(j, "newton_iters");
    } else if (key == "gelu_variant") {
      if (!value.is_string()) throw ConfigError("config key 'gelu_variant' must be a string");
      cfg.scale.gelu_variant = parse_gelu_variant(value.get<std::string>());
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
        throw ConfigError("config key 'seed' must be a non-negative integer");
      }
      cfg.seed = value.get<std::uint64_t>();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  cfg.scale.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::json to_json(const RunConfig& cfg) {
  return {
      {"p_bits", cfg.scale.p_bits},
      {"scale_bits", cfg.scale.scale_bits},
      {"div_t_max", cfg.scale.div_t_max},
      {"newton_iters", cfg.scale.newton_iters},
      {"gelu_variant", std::string(to_string(cfg.scale.gelu_variant))},
      {"seed", cfg.seed},
  };
}

}  // namespace sqvit
