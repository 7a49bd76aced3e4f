/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "sqvit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "sqvit/errors.hpp"
#include "sqvit/fp_reference.hpp"
#include "sqvit/newton.hpp"
#include "sqvit/qnn_ops.hpp"

namespace sqvit::bench {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
}

// Uniform doubles from the top 53 bits of mt19937_64, so streams are identical
// across standard library implementations.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : gen_(seed) {}
  double next(double lo, double hi) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  FTensor tensor(Shape shape, double lo, double hi) {
    FTensor t(std::move(shape));
    for (auto& v : t.data()) v = next(lo, hi);
    return t;
  }

 private:
  std::mt19937_64 gen_;
};

struct TrialResult {
  double sum_sq = 0.0;
  double max_abs = 0.0;
  std::size_t count = 0;
  std::uint64_t saturations = 0;
  std::uint64_t digest = kFnvOffset;
};

GeluVariant variant_for(const ExperimentSpec& spec, const ScaleConfig& cfg) {
  return spec.gelu_variant.value_or(cfg.gelu_variant);
}

ExperimentSpec with_input_dims(ExperimentSpec spec) {
  if (!spec.input) return spec;
  const Shape& s = spec.input->shape();
  switch (spec.op) {
    case Operator::kLinear:
      if (s.size() != 4) throw UsageError("linear input tensor must be [B, H, W, I]");
      spec.batch = s[0];
      spec.height = s[1];
      spec.width = s[2];
      spec.in_channels = s[3];
      break;
    case Operator::kAttention:
    case Operator::kFactorizedAttention:
      if (s.size() != 2) throw UsageError("attention input tensor must be [T, d]");
      spec.height = s[0];
      spec.width = s[1];
      break;
    default:
      if (s.size() != 4) throw UsageError("input tensor must be [B, I, H, W]");
      spec.batch = s[0];
      spec.in_channels = s[1];
      spec.height = s[2];
      spec.width = s[3];
      break;
  }
  return spec;
}

TrialResult run_trial(const ExperimentSpec& spec, const ScaleConfig& cfg, int trial) {
  UniformSource src(trial_seed(spec.seed, static_cast<std::uint64_t>(trial)));
  SaturationCounter sat;
  const std::size_t b = spec.batch, ci = spec.in_channels, co = spec.out_channels;
  const std::size_t k = spec.kernel, h = spec.height, w = spec.width;

  auto input = [&](Shape shape) {
    return spec.input ? *spec.input : src.tensor(std::move(shape), spec.input_lo, spec.input_hi);
  };
  auto weights = [&](Shape shape) { return src.tensor(std::move(shape), spec.weight_lo, spec.weight_hi); };
  auto q = [&](const FTensor& t) { return quantize(t, cfg); };

  QTensor out_q;
  FTensor out_ref;
  switch (spec.op) {
    case Operator::kConv2d:
    case Operator::kDepthwiseConv2d: {
      const bool dw = spec.op == Operator::kDepthwiseConv2d;
      const FTensor x = input({b, ci, h, w});
      const FTensor wt = weights({co, dw ? 1 : ci, k, k});
      const FTensor bias = weights({co});
      const ConvSpec cs{ci, co, k, 1, 0, dw};
      out_q = conv2d(q(x), q(wt), q(bias), cs, cfg, &sat);
      out_ref = ref::conv2d(x, wt, bias, cs);
      break;
    }
    case Operator::kLinear: {
      const FTensor x = input({b, h, w, ci});
      const FTensor wt = weights({co, ci});
      const FTensor bias = weights({co});
      out_q = linear(q(x), q(wt), q(bias), cfg, &sat);
      out_ref = ref::linear(x, wt, bias);
      break;
    }
    case Operator::kLayerNorm: {
      const FTensor x = input({b, ci, h, w});
      const LayerNormParams params = identity_layer_norm_params(w, cfg);
      out_q = layer_norm(q(x), params, cfg, &sat);
      out_ref = ref::layer_norm(x, dequantize(params.gamma), dequantize(params.beta),
                                dequantize(params.eps));
      break;
    }
    case Operator::kSoftmax: {
      const FTensor x = input({b, ci, h, w});
      out_q = softmax(q(x), cfg, &sat);
      out_ref = ref::softmax(x, ref::SoftmaxKind::kSeries);
      break;
    }
    case Operator::kGelu: {
      const FTensor x = input({b, ci, h, w});
      ScaleConfig gcfg = cfg;
      gcfg.gelu_variant = variant_for(spec, cfg);
      out_q = gelu(q(x), gcfg, &sat);
      out_ref = ref::gelu_exact(x);
      break;
    }
    case Operator::kRelu: {
      const FTensor x = input({b, ci, h, w});
      out_q = relu(q(x));
      out_ref = ref::relu(x);
      break;
    }
    case Operator::kAttention:
    case Operator::kFactorizedAttention: {
      const FTensor qq = input({h, w});
      const FTensor kk = src.tensor({h, w}, spec.input_lo, spec.input_hi);
      const FTensor vv = src.tensor({h, w}, spec.input_lo, spec.input_hi);
      if (spec.op == Operator::kAttention) {
        out_q = attention(q(qq), q(kk), q(vv), w, cfg, &sat);
        out_ref = ref::attention(qq, kk, vv, w);
      } else {
        out_q = factorized_attention(q(qq), q(kk), q(vv), w, cfg, &sat);
        out_ref = ref::factorized_attention(qq, kk, vv, w);
      }
      break;
    }
  }

  TrialResult r;
  const FTensor deq = dequantize(out_q);
  if (deq.shape() != out_ref.shape()) throw ShapeError("quantized and reference outputs differ in shape");
  for (std::size_t i = 0; i < deq.size(); ++i) {
    const double d = deq[i] - out_ref[i];
    r.sum_sq += d * d;
    r.max_abs = std::max(r.max_abs, std::fabs(d));
  }
  r.count = deq.size();
  for (const auto& e : out_q.data()) {
    fnv_mix(r.digest, static_cast<std::uint64_t>(e.signed_value()));
    fnv_mix(r.digest, static_cast<std::uint64_t>(static_cast<std::int64_t>(e.scale())));
  }
  r.saturations = sat.count;
  return r;
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::string_view operator_name(Operator op) {
  switch (op) {
    case Operator::kConv2d: return "conv2d";
    case Operator::kDepthwiseConv2d: return "depthwise_conv2d";
    case Operator::kLinear: return "linear";
    case Operator::kLayerNorm: return "layer_norm";
    case Operator::kSoftmax: return "softmax";
    case Operator::kGelu: return "gelu";
    case Operator::kRelu: return "relu";
    case Operator::kAttention: return "attention";
    case Operator::kFactorizedAttention: return "factorized_attention";
  }
  return "unknown";
}

Operator parse_operator(std::string_view name) {
  for (auto op : {Operator::kConv2d, Operator::kDepthwiseConv2d, Operator::kLinear,
                  Operator::kLayerNorm, Operator::kSoftmax, Operator::kGelu, Operator::kRelu,
                  Operator::kAttention, Operator::kFactorizedAttention}) {
    if (operator_name(op) == name) return op;
  }
  throw UsageError("unknown operator '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  if (batch == 0 || in_channels == 0 || out_channels == 0 || kernel == 0 || height == 0 ||
      width == 0) {
    throw UsageError("experiment dimensions must be positive");
  }
  if (trials < 1) throw UsageError("trials must be >= 1");
  if (!(input_lo < input_hi) || !(weight_lo < weight_hi)) {
    throw UsageError("distribution ranges must satisfy lo < hi");
  }
  if (op == Operator::kDepthwiseConv2d && out_channels % in_channels != 0) {
    throw UsageError("depthwise_conv2d needs O to be a multiple of I");
  }
  if ((op == Operator::kConv2d || op == Operator::kDepthwiseConv2d) &&
      (kernel > height || kernel > width)) {
    throw UsageError("kernel larger than input");
  }
}

std::string ExperimentSpec::label(const ScaleConfig& cfg) const {
  std::string name(operator_name(op));
  if (op == Operator::kGelu) name += ":" + std::string(to_string(variant_for(*this, cfg)));
  return name;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(master ^ splitmix64(trial));
}

BenchReport run_bench(const ExperimentSpec& requested, const ScaleConfig& cfg, unsigned jobs) {
  cfg.validate();
  const ExperimentSpec spec = with_input_dims(requested);
  spec.validate();

  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialResult> results(static_cast<std::size_t>(spec.trials));
  jobs = std::clamp(jobs, 1u, static_cast<unsigned>(spec.trials));
  if (jobs == 1) {
    for (int t = 0; t < spec.trials; ++t) results[t] = run_trial(spec, cfg, t);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (unsigned j = 0; j < jobs; ++j) {
      workers.emplace_back([&, j] {
        try {
          for (int t = static_cast<int>(j); t < spec.trials; t += static_cast<int>(jobs)) {
            results[t] = run_trial(spec, cfg, t);
          }
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
    }
    for (auto& th : workers) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  BenchReport report;
  report.op_label = spec.label(cfg);
  report.batch = spec.batch;
  report.in_channels = spec.in_channels;
  report.out_channels = spec.out_channels;
  report.kernel = spec.kernel;
  report.height = spec.height;
  report.width = spec.width;
  report.trials = spec.trials;

  double sum_sq = 0.0;
  std::size_t count = 0;
  report.output_digest = kFnvOffset;
  for (const auto& r : results) {
    sum_sq += r.sum_sq;
    count += r.count;
    report.max_abs_err = std::max(report.max_abs_err, r.max_abs);
    report.saturations += r.saturations;
    fnv_mix(report.output_digest, r.digest);
  }
  report.mse = count == 0 ? 0.0 : sum_sq / static_cast<double>(count);

  const MemoryReport mem = memory_report(cfg);
  report.bits_per_element = mem.bits_per_element;
  report.reduction_factor = mem.reduction_factor;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<ExperimentSpec> desk_suite(std::uint64_t seed, int trials) {
  auto make = [&](Operator op, std::size_t in, std::size_t out) {
    ExperimentSpec s;
    s.op = op;
    s.in_channels = in;
    s.out_channels = out;
    s.trials = trials;
    s.seed = seed;
    return s;
  };
  std::vector<ExperimentSpec> suite = {
      make(Operator::kConv2d, 3, 3),
      make(Operator::kConv2d, 3, 9),
      make(Operator::kConv2d, 3, 1),
      make(Operator::kLayerNorm, 3, 3),
      make(Operator::kDepthwiseConv2d, 3, 3),
      make(Operator::kDepthwiseConv2d, 3, 9),
      make(Operator::kLinear, 3, 9),
      make(Operator::kLinear, 3, 1),
      make(Operator::kLinear, 3, 3),
      make(Operator::kSoftmax, 3, 3),
      make(Operator::kGelu, 3, 3),
      make(Operator::kGelu, 3, 3),
  };
  suite[10].gelu_variant = GeluVariant::kSeriesCubed;
  suite[11].gelu_variant = GeluVariant::kSeriesLinear;
  return suite;
}

std::string csv_header() {
  return "operator,B,I,O,K,H,W,trials,mse,max_abs_err,saturations,bits_per_element,"
         "reduction_factor";
}

std::string to_csv_row(const BenchReport& r) {
  std::string row = r.op_label;
  for (std::size_t d : {r.batch, r.in_channels, r.out_channels, r.kernel, r.height, r.width}) {
    row += "," + std::to_string(d);
  }
  row += "," + std::to_string(r.trials);
  row += "," + format("%.6e", r.mse);
  row += "," + format("%.6e", r.max_abs_err);
  row += "," + std::to_string(r.saturations);
  row += "," + std::to_string(r.bits_per_element);
  row += "," + format("%.6f", r.reduction_factor);
  return row;
}

nlohmann::json to_json(const BenchReport& r) {
  return {
      {"operator", r.op_label},
      {"B", r.batch},
      {"I", r.in_channels},
      {"O", r.out_channels},
      {"K", r.kernel},
      {"H", r.height},
      {"W", r.width},
      {"trials", r.trials},
      {"mse", r.mse},
      {"max_abs_err", r.max_abs_err},
      {"saturations", r.saturations},
      {"bits_per_element", r.bits_per_element},
      {"reduction_factor", r.reduction_factor},
      {"output_digest", r.output_digest},
  };
}

MemoryReport memory_report(const ScaleConfig& cfg) {
  MemoryReport m;
  m.p_bits = cfg.p_bits;
  m.scale_bits = cfg.scale_bits;
  m.bits_per_element = cfg.bits_per_element();
  m.reduction_factor = 64.0 / static_cast<double>(m.bits_per_element);
  return m;
}

DivSweepReport div_sweep(const ScaleConfig& cfg) {
  cfg.validate();
  DivSweepReport rep;
  const std::uint32_t max_mag = cfg.max_magnitude();
  double total = 0.0;
  for (std::uint32_t a = 1; a <= max_mag; ++a) {
    const ScaledInt qa = ScaledInt::from_parts(a, false, 0, cfg);
    for (std::uint32_t b = 1; b <= max_mag; ++b) {
      const ScaledInt qb = ScaledInt::from_parts(b, false, 0, cfg);
      const double exact = static_cast<double>(a) / static_cast<double>(b);
      const double got = dequantize(scale_div(qa, qb, cfg));
      const double rel = std::fabs(got - exact) / exact;
      ++rep.cases;
      total += rel;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_dividend = a;
        rep.worst_divisor = b;
      }
      if (a % b == 0) {
        ++rep.divisible_cases;
        if (got != exact) ++rep.divisible_inexact;
      }
    }
  }
  rep.mean_rel_err = total / static_cast<double>(rep.cases);
  return rep;
}

InvSqrtReport invsqrt_trace(double value, const ScaledInt& x, const ScaledInt& y0, int iters,
                            const ScaleConfig& cfg) {
  InvSqrtReport rep;
  rep.value = value;
  rep.input = x;
  rep.seed = y0;
  const NewtonResult q = newton_inv_sqrt(x, y0, iters, cfg);
  const std::vector<double> fp = ref::newton_inv_sqrt(value, dequantize(y0), iters);
  for (int j = 0; j <= iters; ++j) {
    rep.rows.push_back({j, q.trace.entries[static_cast<std::size_t>(j)], fp[static_cast<std::size_t>(j)]});
  }
  rep.exact = 1.0 / std::sqrt(value);
  return rep;
}

std::string render_csv(const InvSqrtReport& r) {
  std::string out = "iteration,Y,SY,quantized,fp64\n";
  auto line = [&](const std::string& tag, const ScaledInt& q, double fp) {
    out += tag + "," + std::to_string(q.signed_value()) + "," + std::to_string(q.scale()) + "," +
           format("%.7g", dequantize(q)) + "," + format("%.7g", fp) + "\n";
  };
  for (const auto& row : r.rows) line(std::to_string(row.iteration), row.quantized, row.fp64);
  line("final", r.rows.back().quantized, r.rows.back().fp64);
  out += "exact,,," + format("%.7g", r.exact) + "," + format("%.7g", r.exact) + "\n";
  return out;
}

}  // namespace sqvit::bench
