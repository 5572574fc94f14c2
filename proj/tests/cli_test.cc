// Copyright 2026 The Rekeyrand Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rekeyrand/cli.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "rekeyrand/rand_state.h"

namespace rekeyrand {
namespace {

const std::string kZeroSeed(88, '0');

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult RunTool(std::vector<std::string> args) {
  args.insert(args.begin(), "rekeyrand");
  std::ostringstream out;
  std::ostringstream err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("rekeyrand_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

TEST_F(CliTest, GenIsDeterministicWithExplicitSeed) {
  const CliResult a = RunTool({"gen", "--count", "10", "--seed", kZeroSeed,
                           "--policy", "fixed"});
  const CliResult b = RunTool({"gen", "--count", "10", "--seed", kZeroSeed,
                           "--policy", "fixed"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto lines = Lines(a.out);
  ASSERT_EQ(lines.size(), 10u);
  EXPECT_EQ(lines[0], "927652024");
}

TEST_F(CliTest, GenRawMatchesLibraryBytes) {
  const CliResult r =
      RunTool({"gen", "--count", "300", "--seed", kZeroSeed, "--raw"});
  ASSERT_EQ(r.code, kExitOk);
  RandState state(Seed{}, RekeyPolicy::Fixed());
  const std::vector<uint8_t> expected = state.RandomBytes(1200);
  EXPECT_EQ(r.out, std::string(expected.begin(), expected.end()));
}

TEST_F(CliTest, GenUsageErrors) {
  EXPECT_EQ(RunTool({"gen", "--count", "0", "--seed", kZeroSeed}).code,
            kExitUsageError);
  EXPECT_EQ(RunTool({"gen", "--seed", kZeroSeed}).code, kExitUsageError);
  const CliResult bad = RunTool({"gen", "--count", "5", "--seed", "abc"});
  EXPECT_EQ(bad.code, kExitUsageError);
  EXPECT_NE(bad.err.find("--seed"), std::string::npos);
  EXPECT_EQ(RunTool({"gen", "--count", "5", "--seed", std::string(88, 'z')}).code,
            kExitUsageError);
  EXPECT_EQ(RunTool({"gen", "--count", "5", "--policy", "sometimes"}).code,
            kExitUsageError);
  EXPECT_EQ(RunTool({"gen", "--count", "5", "--fixed-interval", "0"}).code,
            kExitUsageError);
  EXPECT_EQ(RunTool({}).code, kExitUsageError);
}

TEST_F(CliTest, HelpSucceeds) {
  const CliResult r = RunTool({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("gen"), std::string::npos);
}

TEST_F(CliTest, UnwritableOutputIsRuntimeError) {
  EXPECT_EQ(RunTool({"gen", "--count", "5", "--output",
                 Path("missing/dir/out.txt")})
                .code,
            kExitRuntimeError);
}

TEST_F(CliTest, GenFullWorkloadWritesHundredEvents) {
  const CliResult r =
      RunTool({"gen", "--count", "39600000", "--policy", "fixed", "--raw",
           "--output", "/dev/null", "--events", Path("events.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = Lines(ReadFile(Path("events.csv")));
  ASSERT_EQ(lines.size(), 101u);
  EXPECT_EQ(lines[0], "ordinal,output_offset,interval_chosen");
  EXPECT_EQ(lines[1], "0,0,1600000");
  EXPECT_EQ(lines[100], "99,158400000,1600000");
}

TEST_F(CliTest, ChisqJsonIsReproducible) {
  const std::vector<std::string> args = {"chisq", "--count", "1000", "--bins",
                                         "10", "--seed", kZeroSeed};
  const CliResult a = RunTool(args);
  const CliResult b = RunTool(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["df"].get<int>(), 9);
  EXPECT_GE(j["p_value"].get<double>(), 0.0);
  EXPECT_LE(j["p_value"].get<double>(), 1.0);
  EXPECT_EQ(j["rekeys"].get<uint64_t>(), 1u);
  EXPECT_EQ(j["seed_hex"].get<std::string>(), kZeroSeed);
}

TEST_F(CliTest, ChisqCsvFormat) {
  const CliResult r = RunTool({"chisq", "--count", "1000", "--bins", "10",
                           "--seed", kZeroSeed, "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk);
  const auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "statistic,df,p_value,rekeys");
}

TEST_F(CliTest, ChisqRejectsSingleBin) {
  EXPECT_EQ(RunTool({"chisq", "--bins", "1", "--seed", kZeroSeed}).code,
            kExitUsageError);
}

TEST_F(CliTest, CompareCsvSchema) {
  const CliResult r = RunTool({"compare", "--count", "5000000", "--runs", "2",
                           "--seed", kZeroSeed, "--reference-policy", "fixed",
                           "--candidate-policy", "fixed", "--report",
                           Path("report.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "metric,reference_s,candidate_s,reduction_pct,increase_pct");
  EXPECT_EQ(lines[1].rfind("wall,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("cpu,", 0), 0u);

  const auto report = nlohmann::json::parse(ReadFile(Path("report.json")));
  ASSERT_EQ(report["reference"]["runs"].size(), 2u);
  ASSERT_EQ(report["candidate"]["runs"].size(), 2u);
  // Matched seeds: run i of each side uses the same seed.
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(report["reference"]["runs"][i]["seed_hex"],
              report["candidate"]["runs"][i]["seed_hex"]);
    EXPECT_EQ(report["reference"]["runs"][i]["bytes"].get<uint64_t>(),
              20'000'000u);
  }
}

TEST_F(CliTest, CompareJsonFormat) {
  const CliResult r = RunTool({"compare", "--count", "5000000", "--runs", "1",
                           "--seed", kZeroSeed, "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["comparison"].size(), 2u);
  EXPECT_EQ(j["candidate"]["runs"][0]["policy"], "fuzzed:1048576");
  EXPECT_EQ(j["reference"]["runs"][0]["policy"], "fixed:1600000");
}

TEST_F(CliTest, IntervalsRequireFuzzedPolicy) {
  EXPECT_EQ(RunTool({"intervals", "--policy", "fixed", "--seed", kZeroSeed}).code,
            kExitUsageError);
}

TEST_F(CliTest, IntervalsDumpAndSummary) {
  const std::vector<std::string> args = {
      "intervals", "--rekeys", "10000", "--seed", kZeroSeed,
      "--summary", Path("summary.json")};
  const CliResult a = RunTool(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const auto lines = Lines(a.out);
  ASSERT_EQ(lines.size(), 10'001u);
  EXPECT_EQ(lines[0], "ordinal,output_offset,interval_chosen");
  for (size_t i = 1; i < lines.size(); ++i) {
    const uint64_t interval = std::stoull(lines[i].substr(lines[i].rfind(',') + 1));
    ASSERT_GE(interval, 1048576u);
    ASSERT_LE(interval, 2097151u);
  }
  const auto summary = nlohmann::json::parse(ReadFile(Path("summary.json")));
  EXPECT_EQ(summary["df"].get<int>(), 15);
  EXPECT_GT(summary["p_value"].get<double>(), 0.001);
  EXPECT_LT(summary["p_value"].get<double>(), 0.999);

  const CliResult b = RunTool(args);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, IntervalsSummaryDefaultsToStderr) {
  const CliResult r =
      RunTool({"intervals", "--rekeys", "200", "--seed", kZeroSeed});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["df"].get<int>(), 15);
}

}  // namespace
}  // namespace rekeyrand
