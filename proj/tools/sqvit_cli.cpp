/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// sqvit: benchmarks and probes for the scaled-integer quantization library.
//
// Exit status: 0 success, 1 usage or configuration error, 2 numeric domain
// error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqvit/bench.hpp"
#include "sqvit/config_io.hpp"
#include "sqvit/convert.hpp"
#include "sqvit/errors.hpp"
#include "sqvit/fp_reference.hpp"
#include "sqvit/newton.hpp"
#include "sqvit/qnn_ops.hpp"
#include "sqvit/tensor_io.hpp"

namespace {

using namespace sqvit;
using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;

  RunConfig load() const {
    RunConfig rc = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed) rc.seed = *seed;
    rc.scale.validate();
    return rc;
  }
};

struct BenchArgs {
  std::string op;
  std::string suite;
  std::size_t batch = 1, in_ch = 3, out_ch = 3, kernel = 1, height = 16, width = 16;
  int trials = 25;
  std::string variant;
  std::string input;
  bool as_json = false;
  unsigned jobs = 1;
};

int run_bench_cmd(const Globals& g, const BenchArgs& a) {
  const RunConfig rc = g.load();
  std::vector<bench::ExperimentSpec> specs;
  if (!a.suite.empty()) {
    if (a.suite != "desk") throw UsageError("unknown suite '" + a.suite + "'");
    specs = bench::desk_suite(rc.seed, a.trials);
  } else {
    if (a.op.empty()) throw UsageError("bench needs --op or --suite");
    bench::ExperimentSpec s;
    s.op = bench::parse_operator(a.op);
    s.batch = a.batch;
    s.in_channels = a.in_ch;
    s.out_channels = a.out_ch;
    s.kernel = a.kernel;
    s.height = a.height;
    s.width = a.width;
    s.trials = a.trials;
    s.seed = rc.seed;
    if (!a.variant.empty()) s.gelu_variant = parse_gelu_variant(a.variant);
    if (!a.input.empty()) {
      AnyTensor t = load_tensor(a.input, rc.scale);
      if (auto* f = std::get_if<FTensor>(&t)) {
        s.input = *f;
      } else {
        s.input = dequantize(std::get<QTensor>(t));
      }
    }
    specs.push_back(s);
  }

  const unsigned jobs = a.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : a.jobs;
  std::vector<bench::BenchReport> reports;
  for (const auto& s : specs) reports.push_back(bench::run_bench(s, rc.scale, jobs));

  if (a.as_json) {
    json rows = json::array();
    for (const auto& r : reports) rows.push_back(bench::to_json(r));
    std::cout << json{{"config", to_json(rc)}, {"results", rows}}.dump(2) << "\n";
  } else {
    std::cout << bench::csv_header() << "\n";
    for (const auto& r : reports) std::cout << bench::to_csv_row(r) << "\n";
  }
  return 0;
}

struct InvSqrtArgs {
  double value = 0.0;
  std::optional<std::int64_t> x_int;
  int x_scale = 0;
  std::optional<std::int64_t> y0_int;
  std::optional<int> y0_scale;
  std::optional<int> iters;
  bool as_json = false;
};

int run_invsqrt_cmd(const Globals& g, const InvSqrtArgs& a) {
  const RunConfig rc = g.load();
  const ScaleConfig& cfg = rc.scale;
  if (!(a.value > 0.0)) throw DomainError("inverse square root needs a positive value");
  const ScaledInt x =
      a.x_int ? ScaledInt::from_signed(*a.x_int, a.x_scale, cfg) : quantize(a.value, cfg);
  const ScaledInt def = default_newton_seed(cfg);
  const ScaledInt y0 = ScaledInt::from_signed(a.y0_int.value_or(def.signed_value()),
                                              a.y0_scale.value_or(def.scale()), cfg);
  const int iters = a.iters.value_or(cfg.newton_iters);
  if (iters < 0) throw UsageError("--iters must be >= 0");
  const bench::InvSqrtReport rep = bench::invsqrt_trace(a.value, x, y0, iters, cfg);
  if (a.as_json) {
    json rows = json::array();
    for (const auto& r : rep.rows) {
      rows.push_back({{"iteration", r.iteration},
                      {"int", r.quantized.signed_value()},
                      {"scale", r.quantized.scale()},
                      {"quantized", dequantize(r.quantized)},
                      {"fp64", r.fp64}});
    }
    std::cout << json{{"value", rep.value},
                      {"x", {rep.input.signed_value(), rep.input.scale()}},
                      {"y0", {rep.seed.signed_value(), rep.seed.scale()}},
                      {"exact", rep.exact},
                      {"rows", rows}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << bench::render_csv(rep);
  }
  return 0;
}

int run_div_sweep_cmd(const Globals& g, bool as_json) {
  const RunConfig rc = g.load();
  const auto r = bench::div_sweep(rc.scale);
  if (as_json) {
    std::cout << json{{"cases", r.cases},
                      {"max_rel_err", r.max_rel_err},
                      {"mean_rel_err", r.mean_rel_err},
                      {"worst", {r.worst_dividend, r.worst_divisor}},
                      {"divisible_cases", r.divisible_cases},
                      {"divisible_inexact", r.divisible_inexact}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "cases," << r.cases << "\n"
              << "max_rel_err," << fmt("%.6e", r.max_rel_err) << "\n"
              << "mean_rel_err," << fmt("%.6e", r.mean_rel_err) << "\n"
              << "worst_case," << r.worst_dividend << "/" << r.worst_divisor << "\n"
              << "divisible_cases," << r.divisible_cases << "\n"
              << "divisible_inexact," << r.divisible_inexact << "\n";
  }
  return 0;
}

struct QuantizeArgs {
  std::vector<double> values;
  std::string tensor;
  std::string out;
};

int run_quantize_cmd(const Globals& g, const QuantizeArgs& a) {
  const RunConfig rc = g.load();
  if (!a.tensor.empty()) {
    AnyTensor t = load_tensor(a.tensor, rc.scale);
    json doc;
    if (auto* f = std::get_if<FTensor>(&t)) {
      const QTensor q = quantize(*f, rc.scale);
      if (!a.out.empty()) save_tensor(a.out, q);
      doc = to_json(q);
    } else {
      const FTensor f2 = dequantize(std::get<QTensor>(t));
      if (!a.out.empty()) save_tensor(a.out, f2);
      doc = to_json(f2);
    }
    if (a.out.empty()) std::cout << doc.dump() << "\n";
    return 0;
  }
  if (a.values.empty()) throw UsageError("quantize needs values or --tensor");
  std::cout << "value,int,scale,dequantized,abs_err\n";
  for (double v : a.values) {
    const ScaledInt q = quantize(v, rc.scale);
    const double d = dequantize(q);
    std::cout << fmt("%.9g", v) << "," << q.signed_value() << "," << q.scale() << ","
              << fmt("%.9g", d) << "," << fmt("%.3e", d > v ? d - v : v - d) << "\n";
  }
  return 0;
}

struct GeluArgs {
  double from = -4.0;
  double to = 4.0;
  int steps = 81;
  std::string variant;
};

int run_gelu_curve_cmd(const Globals& g, const GeluArgs& a) {
  const RunConfig rc = g.load();
  if (a.steps < 2 || !(a.from < a.to)) throw UsageError("gelu-curve needs --steps >= 2 and --from < --to");
  const GeluVariant variant = a.variant.empty() ? rc.scale.gelu_variant : parse_gelu_variant(a.variant);
  std::cout << "x,quantized,exact\n";
  for (int i = 0; i < a.steps; ++i) {
    const double x = a.from + (a.to - a.from) * i / (a.steps - 1);
    const double qv = dequantize(gelu(quantize(x, rc.scale), variant, rc.scale));
    std::cout << fmt("%.6g", x) << "," << fmt("%.9g", qv) << "," << fmt("%.9g", ref::gelu_exact(x))
              << "\n";
  }
  return 0;
}

int run_info_cmd(const Globals& g, bool as_json) {
  const RunConfig rc = g.load();
  const ScaleConfig& c = rc.scale;
  const auto m = bench::memory_report(c);
  if (as_json) {
    json j = to_json(rc);
    j["scale_min"] = c.scale_min();
    j["scale_max"] = c.scale_max();
    j["max_magnitude"] = c.max_magnitude();
    j["bits_per_element"] = m.bits_per_element;
    j["fp64_bits_per_element"] = 64;
    j["reduction_factor"] = m.reduction_factor;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "p_bits," << c.p_bits << "\n"
            << "scale_bits," << c.scale_bits << "\n"
            << "scale_range," << c.scale_min() << ".." << c.scale_max() << "\n"
            << "max_magnitude," << c.max_magnitude() << "\n"
            << "div_t_max," << c.div_t_max << "\n"
            << "newton_iters," << c.newton_iters << "\n"
            << "gelu_variant," << to_string(c.gelu_variant) << "\n"
            << "bits_per_element," << m.bits_per_element << "\n"
            << "fp64_bits_per_element,64\n"
            << "reduction_factor," << fmt("%.6f", m.reduction_factor) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaled-integer quantization benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "MSE of a quantized operator against FP64");
  bench_cmd->add_option("--op", ba.op, "conv2d, depthwise_conv2d, linear, layer_norm, softmax, gelu, relu, attention, factorized_attention");
  bench_cmd->add_option("--suite", ba.suite, "Named experiment suite (desk)");
  bench_cmd->add_option("--B", ba.batch, "Batch size");
  bench_cmd->add_option("--I", ba.in_ch, "Input channels");
  bench_cmd->add_option("--O", ba.out_ch, "Output channels");
  bench_cmd->add_option("--K", ba.kernel, "Kernel size");
  bench_cmd->add_option("--H", ba.height, "Height");
  bench_cmd->add_option("--W", ba.width, "Width");
  bench_cmd->add_option("--trials", ba.trials, "Trials per experiment");
  bench_cmd->add_option("--variant", ba.variant, "GELU variant");
  bench_cmd->add_option("--input", ba.input, "Tensor file used as the input of every trial")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--jobs", ba.jobs, "Worker threads (0 = all cores)");
  bench_cmd->add_flag("--json", ba.as_json, "Emit JSON instead of CSV");

  InvSqrtArgs ia;
  auto* inv_cmd = app.add_subcommand("invsqrt", "Trace the quantized inverse square root");
  inv_cmd->add_option("value", ia.value, "Real value x")->required();
  inv_cmd->add_option("--int", ia.x_int, "Signed integer of x (default: quantize value)");
  inv_cmd->add_option("--scale", ia.x_scale, "Scale of x when --int is given");
  inv_cmd->add_option("--y0-int", ia.y0_int, "Seed integer");
  inv_cmd->add_option("--y0-scale", ia.y0_scale, "Seed scale");
  inv_cmd->add_option("--iters", ia.iters, "Iterations (default: newton_iters)");
  inv_cmd->add_flag("--json", ia.as_json, "Emit JSON instead of CSV");

  bool div_json = false;
  auto* div_cmd = app.add_subcommand("div-sweep", "Exhaustive division accuracy at scale 0");
  div_cmd->add_flag("--json", div_json, "Emit JSON");

  QuantizeArgs qa;
  auto* q_cmd = app.add_subcommand("quantize", "Quantize values or convert a tensor file");
  q_cmd->add_option("values", qa.values, "Real values");
  q_cmd->add_option("--tensor", qa.tensor, "Tensor file (f64 is quantized, scaled is dequantized)")
      ->check(CLI::ExistingFile);
  q_cmd->add_option("--out", qa.out, "Output tensor file");

  GeluArgs ga;
  auto* gelu_cmd = app.add_subcommand("gelu-curve", "CSV of quantized and exact GELU");
  gelu_cmd->add_option("--from", ga.from, "First x");
  gelu_cmd->add_option("--to", ga.to, "Last x");
  gelu_cmd->add_option("--steps", ga.steps, "Number of points");
  gelu_cmd->add_option("--variant", ga.variant, "GELU variant");

  bool info_json = false;
  auto* info_cmd = app.add_subcommand("info", "Format parameters and memory footprint");
  info_cmd->add_flag("--json", info_json, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (bench_cmd->parsed()) return run_bench_cmd(g, ba);
    if (inv_cmd->parsed()) return run_invsqrt_cmd(g, ia);
    if (div_cmd->parsed()) return run_div_sweep_cmd(g, div_json);
    if (q_cmd->parsed()) return run_quantize_cmd(g, qa);
    if (gelu_cmd->parsed()) return run_gelu_curve_cmd(g, ga);
    if (info_cmd->parsed()) return run_info_cmd(g, info_json);
  } catch (const DomainError& e) {
    std::cerr << "sqvit: domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const DivisionByZero& e) {
    std::cerr << "sqvit: division by zero: " << e.what() << "\n";
    return kExitDomain;
  } catch (const RangeError& e) {
    std::cerr << "sqvit: out of range: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "sqvit: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
