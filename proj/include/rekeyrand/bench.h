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

// Timed generation runs with rekey instrumentation, multi-run means, and the
// two-column percent comparison ("reduction in time", "increase in
// performance") used to report patched-vs-unpatched results.

#ifndef REKEYRAND_BENCH_H_
#define REKEYRAND_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rekeyrand/rand_state.h"

namespace rekeyrand {

struct Workload {
  enum class Kind { kRawU32, kUniform };

  Kind kind = Kind::kRawU32;
  uint32_t bound = 0;

  static Workload RawU32() { return {}; }
  static Workload UniformBelow(uint32_t bound) {
    return {Kind::kUniform, bound};
  }
  std::string Describe() const;
};

struct RunMeasurement {
  double wall_s = 0.0;
  // Process user-mode CPU time.
  double cpu_s = 0.0;
  // Process system CPU time; informational only.
  double sys_s = 0.0;
  uint64_t rekey_count = 0;
  uint64_t bytes_generated = 0;
  RekeyPolicy policy;
  Seed seed{};
};

struct BenchReport {
  std::vector<RunMeasurement> runs;
  double mean_wall_s = 0.0;
  double mean_cpu_s = 0.0;

  // {"runs":[{"wall_s":..,"cpu_s":..,"rekeys":..,"bytes":..,"policy":..,
  //  "seed_hex":..}],"mean_wall_s":..,"mean_cpu_s":..}
  std::string ToJson() const;
};

struct ComparisonRow {
  std::string metric;
  double reference_s;
  double candidate_s;
  double reduction_pct;
  double increase_pct;
};

// Times the generation of `n_integers` values from a fresh engine (engine
// construction is excluded). Throws std::invalid_argument if n_integers == 0.
RunMeasurement RunGenerationBench(uint64_t n_integers,
                                  const RekeyPolicy& policy, const Seed& seed,
                                  const Workload& workload);

// Throws std::invalid_argument on an empty list.
BenchReport Aggregate(std::span<const RunMeasurement> runs);

// reduction = 100 (ref - new) / ref, increase = 100 (ref - new) / new.
// Throws std::invalid_argument if either time is not positive.
ComparisonRow ComparePair(const std::string& metric, double reference_s,
                          double candidate_s);

// One row per time metric: "wall" and "cpu".
std::vector<ComparisonRow> Compare(const BenchReport& reference,
                                   const BenchReport& candidate);

// "metric,reference_s,candidate_s,reduction_pct,increase_pct" plus rows.
std::string ComparisonToCsv(std::span<const ComparisonRow> rows);
std::string ComparisonToJson(std::span<const ComparisonRow> rows);

// Per-run seed for run `index` of a multi-run experiment: the first kSeedSize
// bytes of ChaCha20 keyed by `base` at block counter `index`. Matched seeds
// let two policies be compared run for run.
Seed DeriveRunSeed(const Seed& base, uint32_t index);

// Rekey counts for a raw-u32 workload of `n_integers`, one engine per seed.
// Output is not materialized (RandState::Discard), so this is untimed and
// spreads seeds over up to `threads` worker threads.
std::vector<uint64_t> SurveyRekeyCounts(uint64_t n_integers,
                                        const RekeyPolicy& policy,
                                        std::span<const Seed> seeds,
                                        unsigned threads = 0);

}  // namespace rekeyrand

#endif  // REKEYRAND_BENCH_H_
