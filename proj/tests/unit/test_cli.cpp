// Copyright 2026 The schemapar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "../golden_cases.hpp"
#include "cli.hpp"
#include "test_util.hpp"

namespace schemapar {
namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int status = cli::run(testing::expand(args, SCHEMAPAR_CORPUS_DIR), out, err);
  return {status, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

TEST(CliCheck, ValidFile) {
  Result r = run_cli({"check", "@/list_traversal.sch"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "status: ok"));
}

TEST(CliCheck, Recursion) {
  Result r = run_cli({"check", "@/recursion.sch"});
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.out, "recursive procedure"));
}

TEST(CliCheck, MissingFile) {
  Result r = run_cli({"check", "@/does_not_exist.sch"});
  EXPECT_EQ(r.status, 2);
  EXPECT_TRUE(contains(r.err, "cannot open"));
}

TEST(CliCheck, ParseErrorIsUsageStatus) {
  std::string path = ::testing::TempDir() + "/broken.sch";
  std::ofstream(path) << "a: x = f(x then end;\n";
  Result r = run_cli({"check", path});
  EXPECT_EQ(r.status, 2);
  EXPECT_TRUE(contains(r.err, "broken.sch:1:"));
}

TEST(CliUsage, BadFlags) {
  EXPECT_EQ(run_cli({}).status, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).status, 2);
  EXPECT_EQ(run_cli({"--format", "xml", "check", "@/hop.sch"}).status, 2);
  EXPECT_EQ(run_cli({"--fuel", "0", "check", "@/hop.sch"}).status, 2);
  EXPECT_EQ(run_cli({"--format", "csv", "check", "@/hop.sch"}).status, 2);
  EXPECT_EQ(run_cli({"analyze", "@/shift.sch", "--bounds", "i=4..1"}).status, 2);
  EXPECT_EQ(run_cli({"separate", "@/hop.sch", "--verify", "lots"}).status, 2);
  EXPECT_EQ(run_cli({"--help"}).status, 0);
}

TEST(CliSeparate, ListTraversalTwoControllers) {
  Result r = run_cli({"--format", "json", "--fuel", "20000", "separate", "@/list_traversal.sch", "--verify", "trials=20"});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["controller_count"], 2);
  EXPECT_EQ(j["verify"]["depth"]["depth"], 1);
  EXPECT_EQ(j["verify"]["t_equal"]["counterexample"], false);
}

TEST(CliSeparate, StencilStrict) {
  Result r = run_cli({"--format", "json", "separate", "@/stencil4.sch"});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["controller_count"], 1);
  EXPECT_EQ(j["strictly_separated"], true);
}

TEST(CliSeparate, NoIndexedVariables) {
  Result r = run_cli({"separate", "@/plain_loop.sch"});
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.err, "separation requires indexed variables"));
}

TEST(CliSeparate, NotForwardOriented) {
  EXPECT_EQ(run_cli({"separate", "@/index_rewrite.sch"}).status, 1);
}

TEST(CliSeparate, EmitsSchema) {
  std::string path = ::testing::TempDir() + "/separated.sch";
  Result r = run_cli({"separate", "@/hop.sch", "--emit-schema", path});
  ASSERT_EQ(r.status, 0);
  Schema s = parse_schema(read_file(path));
  EXPECT_TRUE(s.aux.contains("vLeb1"));
  EXPECT_EQ(r.out.rfind(pretty_print(s), 0), 0u);
}

TEST(CliAnalyze, StencilLinearAndMatched) {
  Result r = run_cli({"--format", "json", "analyze", "@/stencil4.sch", "--param", "N=3", "--oracle"});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  std::size_t linear_flows = 0;
  for (const auto& e : j["equations"]) linear_flows += e["kind"] == "flow" && e["class"] == "linear";
  EXPECT_EQ(linear_flows, 4u);
  EXPECT_EQ(j["oracle"]["match"], true);
}

TEST(CliAnalyze, UninterpretedIndex) {
  Result r = run_cli({"analyze", "@/indirect.sch", "--param", "N=4"});
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(contains(r.out, "general"));
  EXPECT_TRUE(contains(r.out, "unsolvable statically"));
  EXPECT_EQ(run_cli({"analyze", "@/indirect.sch", "--param", "N=4", "--oracle"}).status, 1);
}

TEST(CliAnalyze, NoArrays) {
  Result r = run_cli({"--format", "json", "analyze", "@/plain_loop.sch"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["equations"].empty());
}

TEST(CliAnalyze, CapExceededKeepsStatus) {
  Result r = run_cli({"--cap", "5", "analyze", "@/linear_mix.sch"});
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(contains(r.out, "cap exceeded"));
}

TEST(CliAnalyze, SidecarBounds) {
  std::string dir = ::testing::TempDir();
  std::ofstream(dir + "/sc.sch") << read_file(testing::corpus_path("shift.sch"));
  std::ofstream(dir + "/sc.bounds") << "# narrow\ni = 0..2\n";
  Result file_only = run_cli({"analyze", dir + "/sc.sch", "--param", "N=9"});
  EXPECT_TRUE(contains(file_only.out, "bounds: i=0..2")) << file_only.out << file_only.err;
  Result both = run_cli({"analyze", dir + "/sc.sch", "--param", "N=9", "--bounds", "i=1..5"});
  EXPECT_TRUE(contains(both.out, "bounds: i=1..5"));
}

TEST(CliSchedule, FrontCountsAndSoundness) {
  for (int n : {2, 4, 6, 8}) {
    Result r = run_cli({"--format", "json", "schedule", "@/stencil4_pred.sch", "--param", "N=" + std::to_string(n)});
    ASSERT_EQ(r.status, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["independent_fronts"], true);
    EXPECT_EQ(j["points"], n * n * n);
    std::size_t total = 0;
    for (const auto& f : j["fronts"]) total += f["size"].get<std::size_t>();
    EXPECT_EQ(total, static_cast<std::size_t>(n * n * n));
  }
}

TEST(CliSchedule, NoReads) {
  Result r = run_cli({"--format", "csv", "schedule", "@/no_reads_pred.sch", "--param", "N=3"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "level,count\n0,9\n");
}

TEST(CliSchedule, ViolationsListed) {
  Result r = run_cli({"schedule", "@/future_read_pred.sch", "--param", "N=2"});
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.out, "(1,1,1) s1 reads"));
}

TEST(CliSchedule, OrdinarySemanticsRejected) {
  EXPECT_EQ(run_cli({"schedule", "@/stencil4.sch", "--param", "N=2"}).status, 1);
}

TEST(CliSchedule, ReplayIndependentOfThreads) {
  auto a = run_cli({"--format", "json", "schedule", "@/stencil4_pred.sch", "--param", "N=4", "--replay", "seed=9",
                    "--threads", "1"});
  auto b = run_cli({"--format", "json", "schedule", "@/stencil4_pred.sch", "--param", "N=4", "--replay", "seed=9",
                    "--threads", "4"});
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
}

class Golden : public ::testing::TestWithParam<testing::GoldenCase> {};

TEST_P(Golden, MatchesFile) {
  const auto& c = GetParam();
  Result first = run_cli(c.args);
  Result second = run_cli(c.args);
  EXPECT_EQ(first.status, c.status) << first.err;
  EXPECT_EQ(first.out, second.out);
  ASSERT_FALSE(first.out.empty());
  EXPECT_EQ(first.out.back(), '\n');
  std::string path = std::string(SCHEMAPAR_GOLDEN_DIR) + "/" + c.name + ".out";
  if (std::getenv("SCHEMAPAR_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << first.out;
    GTEST_SKIP() << "wrote " << path;
  }
  EXPECT_EQ(first.out, read_file(path)) << c.name;
}

INSTANTIATE_TEST_SUITE_P(Cli, Golden, ::testing::ValuesIn(testing::golden_cases()),
                         [](const auto& info) { return info.param.name; });

}  // namespace
}  // namespace schemapar
