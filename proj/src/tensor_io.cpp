/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "sqvit/tensor_io.hpp"

#include <fstream>

#include "sqvit/errors.hpp"

namespace sqvit {

namespace {

Shape read_shape(const nlohmann::json& j) {
  if (!j.contains("shape") || !j["shape"].is_array()) throw ShapeError("tensor file needs a 'shape' array");
  Shape shape;
  for (const auto& d : j["shape"]) {
    if (!d.is_number_unsigned() && !(d.is_number_integer() && d.get<std::int64_t>() >= 0)) {
      throw ShapeError("tensor shape entries must be non-negative integers");
    }
    shape.push_back(d.get<std::size_t>());
  }
  return shape;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << j.dump() << '\n';
}

}  // namespace

nlohmann::json to_json(const FTensor& t) {
  return {{"shape", t.shape()},
          {"kind", "f64"},
          {"data", std::vector<double>(t.data().begin(), t.data().end())}};
}

nlohmann::json to_json(const QTensor& t) {
  nlohmann::json data = nlohmann::json::array();
  for (const auto& q : t.data()) data.push_back({q.signed_value(), q.scale()});
  return {{"shape", t.shape()}, {"kind", "scaled"}, {"data", std::move(data)}};
}

AnyTensor tensor_from_json(const nlohmann::json& j, const ScaleConfig& cfg) {
  if (!j.is_object()) throw ShapeError("tensor file must be a JSON object");
  Shape shape = read_shape(j);
  if (!j.contains("kind") || !j["kind"].is_string()) throw ShapeError("tensor file needs a 'kind' string");
  if (!j.contains("data") || !j["data"].is_array()) throw ShapeError("tensor file needs a 'data' array");
  const std::string kind = j["kind"].get<std::string>();
  const auto& data = j["data"];

  if (kind == "f64") {
    std::vector<double> values;
    values.reserve(data.size());
    for (const auto& v : data) {
      if (!v.is_number()) throw ShapeError("f64 tensor data must be numbers");
      values.push_back(v.get<double>());
    }
    return FTensor(std::move(shape), std::move(values));
  }
  if (kind == "scaled") {
    std::vector<ScaledInt> values;
    values.reserve(data.size());
    for (const auto& v : data) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        throw ShapeError("scaled tensor data must be [signed_int, scale] pairs");
      }
      values.push_back(ScaledInt::from_signed(v[0].get<std::int64_t>(), v[1].get<int>(), cfg));
    }
    return QTensor(std::move(shape), std::move(values));
  }
  throw ShapeError("unknown tensor kind '" + kind + "'");
}

AnyTensor load_tensor(const std::filesystem::path& path, const ScaleConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open tensor file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return tensor_from_json(j, cfg);
}

void save_tensor(const std::filesystem::path& path, const FTensor& t) { write_json(path, to_json(t)); }
void save_tensor(const std::filesystem::path& path, const QTensor& t) { write_json(path, to_json(t)); }

}  // namespace sqvit
