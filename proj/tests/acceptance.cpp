/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// Acceptance checks, one PASS/FAIL line per criterion.
//
//   sqvit_acceptance --cli PATH --tests PATH
//
// --cli is the sqvit executable, --tests the unit test binary (used for the
// property and purity suites).

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <CLI11.hpp>

#include "sqvit/bench.hpp"

namespace {

using Clock = std::chrono::steady_clock;
using sqvit::ScaleConfig;
namespace bench = sqvit::bench;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "MISS ") + what;
  }
};

std::string num(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct ProcResult {
  int status = -1;
  std::string out;
};

ProcResult run(const std::string& cmd) {
  ProcResult r;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

Outcome newton_trace(const std::string& cli) {
  Outcome o;
  const auto t0 = Clock::now();
  const ProcResult p =
      run(cli + " invsqrt 15.25 --int 122 --scale 3 --y0-int 1 --y0-scale 6 --iters 8");
  const double secs = since(t0);
  o.require(p.status == 0, "exit status " + std::to_string(p.status));
  const auto rows = csv_rows(p.out);
  std::map<std::string, std::vector<std::string>> by_tag;
  for (const auto& r : rows) {
    if (r.size() == 5) by_tag[r[0]] = r;
  }
  const std::map<std::string, double> fp_expected{
      {"2", 0.0350}, {"4", 0.0772}, {"6", 0.1576}, {"8", 0.2426}};
  for (const auto& [iter, want] : fp_expected) {
    if (!by_tag.count(iter)) {
      o.require(false, "row " + iter + " missing");
      continue;
    }
    const double got = std::stod(by_tag[iter][4]);
    o.require(std::fabs(got - want) <= 5e-4, "fp64[" + iter + "]=" + num(got, "%.4f"));
  }
  if (!by_tag.count("final")) {
    o.require(false, "final row missing");
  } else {
    const auto& f = by_tag["final"];
    const double q = std::stod(f[3]);
    o.require(std::fabs(q - 0.2578) <= 0.005, "quantized=" + num(q));
    o.require(std::fabs(q - 0.2561) <= 0.01, "|q-0.2561|=" + num(std::fabs(q - 0.2561), "%.4f"));
    const bool exact = f[1] == "33" && f[2] == "7";
    o.detail += std::string("; final (") + f[1] + "," + f[2] + ")" +
                (exact ? " exact" : " (stretch goal (33,7) missed)");
  }
  o.require(secs < 1.0, "runtime " + num(secs, "%.3f") + " s");
  return o;
}

Outcome division_sweep() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto r = bench::div_sweep(ScaleConfig{});
  const double secs = since(t0);
  o.require(r.cases == 255u * 255u, std::to_string(r.cases) + " cases");
  o.require(r.max_rel_err <= std::ldexp(1.0, -6),
            "max rel err " + num(r.max_rel_err, "%.5f") + " at " +
                std::to_string(r.worst_dividend) + "/" + std::to_string(r.worst_divisor));
  o.require(r.divisible_inexact == 0, std::to_string(r.divisible_inexact) + " of " +
                                          std::to_string(r.divisible_cases) +
                                          " divisible cases inexact");
  o.require(secs < 10.0, "runtime " + num(secs, "%.3f") + " s");
  return o;
}

Outcome desk_mse(std::vector<bench::BenchReport>& reports) {
  Outcome o;
  const std::array<double, 12> limits{7.64e-4, 6.63e-4, 6.89e-4, 1.5e-2, 2.8e-4, 5.9e-2,
                                      3.31e-4, 1.79e-4, 3.45e-4, 1.79e-4, 6.6e-2, 2e-3};
  const ScaleConfig cfg;
  const auto t0 = Clock::now();
  const auto suite = bench::desk_suite(0, 25);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    reports.push_back(bench::run_bench(suite[i], cfg));
    const auto& r = reports.back();
    o.require(r.mse <= limits[i], r.op_label + "(" + std::to_string(r.in_channels) + "," +
                                      std::to_string(r.out_channels) + ")=" + num(r.mse, "%.3e") +
                                      "<=" + num(limits[i], "%.3g"));
  }
  const double secs = since(t0);
  o.require(reports[11].mse < reports[10].mse, "gelu series-linear < series-cubed");
  o.require(secs < 60.0, "runtime " + num(secs, "%.3f") + " s");
  return o;
}

Outcome memory(const std::string& cli) {
  Outcome o;
  const ProcResult p = run(cli + " info");
  o.require(p.status == 0, "exit status " + std::to_string(p.status));
  std::map<std::string, std::string> kv;
  for (const auto& r : csv_rows(p.out)) {
    if (r.size() == 2) kv[r[0]] = r[1];
  }
  o.require(kv["bits_per_element"] == "13", "bits_per_element=" + kv["bits_per_element"]);
  const double f = kv.count("reduction_factor") ? std::stod(kv["reduction_factor"]) : 0.0;
  o.require(std::fabs(f - 4.923) <= 1e-3, "reduction_factor=" + kv["reduction_factor"]);
  return o;
}

Outcome gtest_suites(const std::string& tests, const std::string& filter, const char* what) {
  Outcome o;
  const ProcResult p = run(tests + " --gtest_brief=1 --gtest_filter='" + filter + "'");
  std::size_t ran = 0;
  const auto pos = p.out.rfind("[==========] ");
  if (pos != std::string::npos) ran = std::stoul(p.out.substr(pos + 13));
  o.require(p.status == 0 && ran > 0,
            std::string(what) + ": " + std::to_string(ran) + " tests, exit " +
                std::to_string(p.status));
  return o;
}

Outcome purity_and_determinism(const std::string& cli, const std::string& tests,
                               const std::vector<bench::BenchReport>& first) {
  Outcome o = gtest_suites(tests, "Purity.*", "source scan");
  const ScaleConfig cfg;
  const auto suite = bench::desk_suite(0, 25);
  bool same = first.size() == suite.size();
  for (std::size_t i = 0; same && i < suite.size(); ++i) {
    const auto again = bench::run_bench(suite[i], cfg, 4);
    same = again.output_digest == first[i].output_digest &&
           bench::to_csv_row(again) == bench::to_csv_row(first[i]);
  }
  o.require(same, "suite rerun byte-identical quantized outputs");
  const ProcResult a = run(cli + " bench --suite desk --seed 0 --trials 5");
  const ProcResult b = run(cli + " bench --suite desk --seed 0 --trials 5 --jobs 3");
  o.require(a.status == 0 && a.out == b.out, "CLI CSV byte-identical across runs");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sqvit acceptance checks"};
  std::string cli, tests;
  app.add_option("--cli", cli, "Path to the sqvit executable")->required();
  app.add_option("--tests", tests, "Path to the unit test executable")->required();
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail
              << std::endl;
    if (!o.pass) ++failures;
  };

  std::vector<bench::BenchReport> reports;
  report(1, "newton inverse sqrt trace", newton_trace(cli));
  report(2, "division sweep", division_sweep());
  report(3, "desk-scale operator mse", desk_mse(reports));
  report(4, "memory accounting", memory(cli));
  report(5, "property suites", gtest_suites(tests, "Props.*", "randomized properties"));
  report(6, "integer purity and determinism", purity_and_determinism(cli, tests, reports));
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
