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

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rekeyrand/bench.h"
#include "rekeyrand/chi_square.h"
#include "rekeyrand/rand_state.h"
#include "rekeyrand/uniform.h"

namespace rekeyrand {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineOptions {
  std::string policy = "fixed";
  uint64_t fixed_interval = kDefaultFixedInterval;
  uint64_t rekey_base = kDefaultRekeyBase;
  std::string seed = "os";
  std::string output = "-";
};

void AddEngineOptions(CLI::App* cmd, EngineOptions& o) {
  cmd->add_option("--policy", o.policy, "Rekey policy")
      ->check(CLI::IsMember({"fixed", "fuzzed"}))
      ->capture_default_str();
  cmd->add_option("--fixed-interval", o.fixed_interval,
                  "Bytes between rekeys under the fixed policy")
      ->capture_default_str();
  cmd->add_option("--rekey-base", o.rekey_base,
                  "Base of the fuzzed interval [base, 2*base)")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed,
                  "88 hex characters (44 bytes), or \"os\" for kernel entropy")
      ->capture_default_str();
  cmd->add_option("--output,-o", o.output, "Output path, - for stdout")
      ->capture_default_str();
}

RekeyPolicy MakePolicy(const std::string& mode, const EngineOptions& o) {
  RekeyPolicy policy;
  policy.mode = mode == "fuzzed" ? RekeyPolicy::Mode::kFuzzed
                                 : RekeyPolicy::Mode::kFixed;
  policy.fixed_interval = o.fixed_interval;
  policy.rekey_base = o.rekey_base;
  try {
    policy.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return policy;
}

Seed ResolveSeed(const std::string& text) {
  if (text == "os") {
    OsSeedSource source;
    return source.Generate();
  }
  try {
    return ParseSeedHex(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--seed: ") + e.what());
  }
}

// Writes to `fallback` for "-", otherwise to a file opened in binary mode.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot open " + path);
    stream_ = file_.get();
  }

  std::ostream& stream() { return *stream_; }

  void Finish() {
    stream_->flush();
    if (!*stream_) throw std::runtime_error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void WriteFile(const std::string& path, const std::string& content,
               std::ostream& fallback) {
  OutputTarget target(path, fallback);
  target.stream() << content;
  target.Finish();
}

struct GenOptions {
  EngineOptions engine;
  uint64_t count = 0;
  bool raw = false;
  std::string events;
};

void RunGen(const GenOptions& o, std::ostream& out) {
  const RekeyPolicy policy = MakePolicy(o.engine.policy, o.engine);
  RandState state(ResolveSeed(o.engine.seed), policy);
  OutputTarget target(o.engine.output, out);
  std::ostream& os = target.stream();

  if (o.raw) {
    std::vector<uint8_t> chunk(1 << 16);
    uint64_t remaining = 4 * o.count;
    while (remaining > 0) {
      const size_t n = static_cast<size_t>(
          std::min<uint64_t>(remaining, chunk.size()));
      state.RandomBuf(std::span(chunk).first(n));
      os.write(reinterpret_cast<const char*>(chunk.data()),
               static_cast<std::streamsize>(n));
      remaining -= n;
    }
  } else {
    std::vector<char> text(1 << 16);
    size_t used = 0;
    for (uint64_t i = 0; i < o.count; ++i) {
      if (text.size() - used < 12) {
        os.write(text.data(), static_cast<std::streamsize>(used));
        used = 0;
      }
      char* end = std::to_chars(text.data() + used, text.data() + text.size(),
                                state.RandomU32())
                      .ptr;
      *end++ = '\n';
      used = static_cast<size_t>(end - text.data());
    }
    os.write(text.data(), static_cast<std::streamsize>(used));
  }
  target.Finish();

  if (!o.events.empty()) {
    WriteFile(o.events, RekeyEventsToCsv(state.events()), out);
  }
}

struct ChisqOptions {
  EngineOptions engine;
  uint64_t count = 39'600'000;
  uint32_t bins = 100;
  std::string format = "json";
};

void RunChisq(const ChisqOptions& o, std::ostream& out) {
  if (o.bins < 2) throw UsageError("--bins must be at least 2");
  const RekeyPolicy policy = MakePolicy(o.engine.policy, o.engine);
  const Seed seed = ResolveSeed(o.engine.seed);
  RandState state(seed, policy, /*record_events=*/false);
  Histogram histogram = Histogram::Categorical(o.bins);
  uint64_t rejections = 0;
  for (uint64_t i = 0; i < o.count; ++i) {
    histogram.Add(Uniform(state, o.bins, &rejections));
  }
  const ChiSquareResult result = ChiSquareUniformTest(histogram);

  OutputTarget target(o.engine.output, out);
  if (o.format == "csv") {
    target.stream().precision(17);
    target.stream() << "statistic,df,p_value,rekeys\n"
                    << result.statistic << ',' << result.df << ','
                    << result.p_value << ',' << state.rekey_count() << '\n';
  } else {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(result.ToJson());
    j["rekeys"] = state.rekey_count();
    j["count"] = o.count;
    j["bins"] = o.bins;
    j["rejections"] = rejections;
    j["policy"] = policy.Describe();
    j["seed_hex"] = SeedToHex(seed);
    target.stream() << j.dump() << '\n';
  }
  target.Finish();
}

struct CompareOptions {
  EngineOptions engine;
  std::string reference_policy = "fixed";
  std::string candidate_policy = "fuzzed";
  uint64_t count = 39'600'000;
  uint32_t runs = 10;
  std::string format = "csv";
  std::string report;
};

void RunCompare(const CompareOptions& o, std::ostream& out) {
  const RekeyPolicy reference = MakePolicy(o.reference_policy, o.engine);
  const RekeyPolicy candidate = MakePolicy(o.candidate_policy, o.engine);
  const Seed base = ResolveSeed(o.engine.seed);

  // Untimed warm-up so the first measured run does not pay for page faults
  // and frequency ramp-up.
  RunGenerationBench(std::min<uint64_t>(o.count, 1'000'000), reference, base,
                     Workload::RawU32());

  std::vector<RunMeasurement> reference_runs;
  std::vector<RunMeasurement> candidate_runs;
  for (uint32_t i = 0; i < o.runs; ++i) {
    const Seed seed = DeriveRunSeed(base, i);
    reference_runs.push_back(
        RunGenerationBench(o.count, reference, seed, Workload::RawU32()));
    candidate_runs.push_back(
        RunGenerationBench(o.count, candidate, seed, Workload::RawU32()));
  }
  const BenchReport reference_report = Aggregate(reference_runs);
  const BenchReport candidate_report = Aggregate(candidate_runs);
  const std::vector<ComparisonRow> rows =
      Compare(reference_report, candidate_report);

  OutputTarget target(o.engine.output, out);
  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["reference"] = nlohmann::ordered_json::parse(reference_report.ToJson());
    j["candidate"] = nlohmann::ordered_json::parse(candidate_report.ToJson());
    j["comparison"] = nlohmann::ordered_json::parse(ComparisonToJson(rows));
    target.stream() << j.dump() << '\n';
  } else {
    target.stream() << ComparisonToCsv(rows);
  }
  target.Finish();

  if (!o.report.empty()) {
    nlohmann::ordered_json j;
    j["reference"] = nlohmann::ordered_json::parse(reference_report.ToJson());
    j["candidate"] = nlohmann::ordered_json::parse(candidate_report.ToJson());
    WriteFile(o.report, j.dump() + "\n", out);
  }
}

struct IntervalsOptions {
  EngineOptions engine;
  uint64_t rekeys = 10'000;
  uint32_t bins = 16;
  std::string summary;
};

void RunIntervals(const IntervalsOptions& o, std::ostream& out,
                  std::ostream& err) {
  if (o.engine.policy != "fuzzed") {
    throw UsageError("intervals requires --policy fuzzed");
  }
  if (o.bins < 2) throw UsageError("--bins must be at least 2");
  if (o.rekeys < 10ull * o.bins) {
    throw UsageError("--rekeys must be at least 10 * --bins");
  }
  const RekeyPolicy policy = MakePolicy(o.engine.policy, o.engine);
  RandState state(ResolveSeed(o.engine.seed), policy);
  while (state.rekey_count() < o.rekeys) {
    state.Discard(static_cast<uint64_t>(state.count()));
  }
  const ChiSquareResult result =
      IntervalUniformityTest(state.events(), policy.rekey_base, o.bins);

  WriteFile(o.engine.output, RekeyEventsToCsv(state.events()), out);
  if (o.summary.empty()) {
    err << result.ToJson() << '\n';
  } else {
    WriteFile(o.summary, result.ToJson() + "\n", out);
  }
}

}  // namespace

int RunCli(std::span<const std::string> args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"ChaCha20 arc4random-style generator with fixed or fuzzed "
               "rekey intervals"};
  app.name("rekeyrand");
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Emit u32 values");
  AddEngineOptions(gen_cmd, gen.engine);
  gen_cmd->add_option("--count", gen.count, "Number of u32 values")
      ->required()
      ->check(CLI::PositiveNumber);
  gen_cmd->add_flag("--raw", gen.raw,
                    "Binary little-endian output instead of decimal lines");
  gen_cmd->add_option("--events", gen.events,
                      "Write the rekey event CSV to this path");

  ChisqOptions chisq;
  CLI::App* chisq_cmd =
      app.add_subcommand("chisq", "Chi-square test of uniform(bins) draws");
  AddEngineOptions(chisq_cmd, chisq.engine);
  chisq_cmd->add_option("--count", chisq.count, "Number of draws")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  chisq_cmd->add_option("--bins", chisq.bins, "Upper bound and bin count")
      ->capture_default_str();
  chisq_cmd->add_option("--format", chisq.format)
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  CompareOptions compare;
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Time generation under two policies and compare");
  AddEngineOptions(compare_cmd, compare.engine);
  compare_cmd->add_option("--reference-policy", compare.reference_policy)
      ->check(CLI::IsMember({"fixed", "fuzzed"}))
      ->capture_default_str();
  compare_cmd->add_option("--candidate-policy", compare.candidate_policy)
      ->check(CLI::IsMember({"fixed", "fuzzed"}))
      ->capture_default_str();
  compare_cmd->add_option("--count", compare.count, "u32 values per run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compare_cmd->add_option("--runs", compare.runs, "Runs per policy")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compare_cmd->add_option("--format", compare.format)
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  compare_cmd->add_option("--report", compare.report,
                          "Also write both per-run reports as JSON");

  IntervalsOptions intervals;
  intervals.engine.policy = "fuzzed";
  CLI::App* intervals_cmd = app.add_subcommand(
      "intervals", "Dump fuzzed rekey intervals and test their uniformity");
  AddEngineOptions(intervals_cmd, intervals.engine);
  intervals_cmd->add_option("--rekeys", intervals.rekeys,
                            "Rekey events to collect, initial one included")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  intervals_cmd->add_option("--bins", intervals.bins)->capture_default_str();
  intervals_cmd->add_option("--summary", intervals.summary,
                            "Uniformity JSON path (default: stderr)");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (gen_cmd->parsed()) {
      RunGen(gen, out);
    } else if (chisq_cmd->parsed()) {
      RunChisq(chisq, out);
    } else if (compare_cmd->parsed()) {
      RunCompare(compare, out);
    } else {
      RunIntervals(intervals, out, err);
    }
  } catch (const UsageError& e) {
    err << "rekeyrand: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const std::exception& e) {
    err << "rekeyrand: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace rekeyrand
