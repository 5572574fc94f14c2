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

#include "rekeyrand/bench.h"

#include <sys/resource.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rekeyrand/uniform.h"

namespace rekeyrand {
namespace {

struct CpuTimes {
  double user_s;
  double sys_s;
};

double ToSeconds(const timeval& tv) {
  return static_cast<double>(tv.tv_sec) + static_cast<double>(tv.tv_usec) * 1e-6;
}

CpuTimes ProcessCpuTimes() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return {ToSeconds(usage.ru_utime), ToSeconds(usage.ru_stime)};
}

// Keeps generated values observable so the loop is not optimized out.
volatile uint32_t g_sink;

}  // namespace

std::string Workload::Describe() const {
  return kind == Kind::kRawU32 ? "raw-u32"
                               : "uniform:" + std::to_string(bound);
}

RunMeasurement RunGenerationBench(uint64_t n_integers,
                                  const RekeyPolicy& policy, const Seed& seed,
                                  const Workload& workload) {
  if (n_integers == 0) {
    throw std::invalid_argument("benchmark needs at least one integer");
  }
  RandState state(seed, policy, /*record_events=*/false);

  const CpuTimes cpu_start = ProcessCpuTimes();
  const auto wall_start = std::chrono::steady_clock::now();
  uint32_t acc = 0;
  if (workload.kind == Workload::Kind::kRawU32) {
    for (uint64_t i = 0; i < n_integers; ++i) acc ^= state.RandomU32();
  } else {
    for (uint64_t i = 0; i < n_integers; ++i) {
      acc ^= Uniform(state, workload.bound);
    }
  }
  const auto wall_end = std::chrono::steady_clock::now();
  const CpuTimes cpu_end = ProcessCpuTimes();
  g_sink = acc;

  RunMeasurement m;
  m.wall_s = std::chrono::duration<double>(wall_end - wall_start).count();
  m.cpu_s = cpu_end.user_s - cpu_start.user_s;
  m.sys_s = cpu_end.sys_s - cpu_start.sys_s;
  m.rekey_count = state.rekey_count();
  m.bytes_generated = state.total_out();
  m.policy = policy;
  m.seed = seed;
  return m;
}

BenchReport Aggregate(std::span<const RunMeasurement> runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to aggregate");
  BenchReport report;
  report.runs.assign(runs.begin(), runs.end());
  double wall = 0.0;
  double cpu = 0.0;
  for (const RunMeasurement& r : runs) {
    wall += r.wall_s;
    cpu += r.cpu_s;
  }
  report.mean_wall_s = wall / static_cast<double>(runs.size());
  report.mean_cpu_s = cpu / static_cast<double>(runs.size());
  return report;
}

std::string BenchReport::ToJson() const {
  nlohmann::ordered_json j;
  j["runs"] = nlohmann::ordered_json::array();
  for (const RunMeasurement& r : runs) {
    nlohmann::ordered_json run;
    run["wall_s"] = r.wall_s;
    run["cpu_s"] = r.cpu_s;
    run["rekeys"] = r.rekey_count;
    run["bytes"] = r.bytes_generated;
    run["policy"] = r.policy.Describe();
    run["seed_hex"] = SeedToHex(r.seed);
    j["runs"].push_back(std::move(run));
  }
  j["mean_wall_s"] = mean_wall_s;
  j["mean_cpu_s"] = mean_cpu_s;
  return j.dump();
}

ComparisonRow ComparePair(const std::string& metric, double reference_s,
                          double candidate_s) {
  if (!(reference_s > 0.0) || !(candidate_s > 0.0)) {
    throw std::invalid_argument("comparison needs positive times for " +
                                metric);
  }
  const double saved = reference_s - candidate_s;
  return {metric, reference_s, candidate_s, 100.0 * saved / reference_s,
          100.0 * saved / candidate_s};
}

std::vector<ComparisonRow> Compare(const BenchReport& reference,
                                   const BenchReport& candidate) {
  if (reference.runs.empty() || candidate.runs.empty()) {
    throw std::invalid_argument("cannot compare an empty report");
  }
  return {ComparePair("wall", reference.mean_wall_s, candidate.mean_wall_s),
          ComparePair("cpu", reference.mean_cpu_s, candidate.mean_cpu_s)};
}

std::string ComparisonToCsv(std::span<const ComparisonRow> rows) {
  std::ostringstream out;
  out.precision(9);
  out << "metric,reference_s,candidate_s,reduction_pct,increase_pct\n";
  for (const ComparisonRow& r : rows) {
    out << r.metric << ',' << r.reference_s << ',' << r.candidate_s << ','
        << r.reduction_pct << ',' << r.increase_pct << '\n';
  }
  return out.str();
}

std::string ComparisonToJson(std::span<const ComparisonRow> rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const ComparisonRow& r : rows) {
    nlohmann::ordered_json row;
    row["metric"] = r.metric;
    row["reference_s"] = r.reference_s;
    row["candidate_s"] = r.candidate_s;
    row["reduction_pct"] = r.reduction_pct;
    row["increase_pct"] = r.increase_pct;
    j.push_back(std::move(row));
  }
  return j.dump();
}

Seed DeriveRunSeed(const Seed& base, uint32_t index) {
  ChaChaKey key;
  ChaChaNonce nonce;
  std::copy_n(base.begin(), kChaChaKeySize, key.begin());
  std::copy_n(base.begin() + kChaChaKeySize, kChaChaNonceSize, nonce.begin());
  const ChaChaBlock block = ChaChaBlockFunction(key, index, nonce);
  Seed seed;
  std::copy_n(block.begin(), kSeedSize, seed.begin());
  return seed;
}

std::vector<uint64_t> SurveyRekeyCounts(uint64_t n_integers,
                                        const RekeyPolicy& policy,
                                        std::span<const Seed> seeds,
                                        unsigned threads) {
  std::vector<uint64_t> counts(seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<size_t>(1, seeds.size()));

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < seeds.size(); i = next++) {
      RandState state(seeds[i], policy, /*record_events=*/false);
      state.Discard(4 * n_integers);
      counts[i] = state.rekey_count();
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  return counts;
}

}  // namespace rekeyrand
