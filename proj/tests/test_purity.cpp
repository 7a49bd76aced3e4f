/*
 * Copyright 2026 The sqvit Authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "sqvit/bench.hpp"

namespace sqvit {
namespace {

std::vector<std::string> split_paths(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string strip_comments_and_strings(const std::string& src) {
  std::string out;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') ++i;
      out += '\n';
    } else if (src.compare(i, 2, "/*") == 0) {
      const auto end = src.find("*/", i + 2);
      i = end == std::string::npos ? src.size() : end + 1;
      out += ' ';
    } else if (src[i] == '"') {
      ++i;
      while (i < src.size() && src[i] != '"') i += src[i] == '\\' ? 2 : 1;
      out += "\"\"";
    } else {
      out += src[i];
    }
  }
  return out;
}

TEST(Purity, QuantizedPathHasNoRealArithmetic) {
  const auto files = split_paths(SQVIT_QUANT_FILES);
  ASSERT_GE(files.size(), 8u);
  const std::regex banned(
      R"(\b(double|float|long\s+double|_Float\d+|sqrt|exp|tanh|pow|ldexp|frexp|nearbyint|fabs)\b|<cmath>|<math\.h>|\bsqvit/convert\.hpp\b|\b\d+\.\d*([eE][-+]?\d+)?\b|\b\d+[eE][-+]?\d+\b)");
  for (const auto& path : files) {
    std::ifstream in(path);
    ASSERT_TRUE(in) << path;
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string code = strip_comments_and_strings(buf.str());
    std::smatch m;
    EXPECT_FALSE(std::regex_search(code, m, banned)) << path << ": '" << m.str() << "'";
  }
}

TEST(Purity, ScannerDetectsReals) {
  const std::regex banned(R"(\bdouble\b)");
  EXPECT_TRUE(std::regex_search(strip_comments_and_strings("int f(double x);"), banned));
  EXPECT_FALSE(std::regex_search(strip_comments_and_strings("// double\nint x;"), banned));
  EXPECT_FALSE(std::regex_search(strip_comments_and_strings("auto s = \"double\";"), banned));
}

TEST(Determinism, SuiteRunsAreByteIdentical) {
  const ScaleConfig cfg;
  for (const auto& spec : bench::desk_suite(0, 5)) {
    const auto a = bench::run_bench(spec, cfg);
    const auto b = bench::run_bench(spec, cfg, 4);
    EXPECT_EQ(a.output_digest, b.output_digest) << a.op_label;
    EXPECT_EQ(bench::to_csv_row(a), bench::to_csv_row(b)) << a.op_label;
  }
}

}  // namespace
}  // namespace sqvit
