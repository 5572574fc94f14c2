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

// Chi-square goodness-of-fit against equiprobable bins.

#ifndef REKEYRAND_CHI_SQUARE_H_
#define REKEYRAND_CHI_SQUARE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rekeyrand/rand_state.h"

namespace rekeyrand {

// Counts observations into k bins. A categorical histogram maps value v to
// bin v. A range histogram splits [lo, hi) into k contiguous sub-ranges whose
// sizes differ by at most one value (equal when k divides hi - lo).
class Histogram {
 public:
  static Histogram Categorical(size_t k);
  static Histogram RangePartition(uint64_t lo, uint64_t hi, size_t k);

  // Throws std::out_of_range if `value` falls in no bin.
  void Add(uint64_t value);

  const std::vector<uint64_t>& bins() const { return bins_; }
  uint64_t total() const { return total_; }
  size_t size() const { return bins_.size(); }

  // Expected count per bin for a uniform source, given total().
  std::vector<double> UniformExpectation() const;

 private:
  Histogram(size_t k, uint64_t lo, uint64_t hi, bool categorical);
  size_t BinOf(uint64_t value) const;
  uint64_t BinWidth(size_t bin) const;

  std::vector<uint64_t> bins_;
  uint64_t total_ = 0;
  uint64_t lo_;
  uint64_t hi_;
  bool categorical_;
};

struct ChiSquareResult {
  double statistic;
  int df;
  double p_value;

  // {"statistic": ..., "df": ..., "p_value": ...}
  std::string ToJson() const;
};

// sum (O_i - E_i)^2 / E_i. Throws std::invalid_argument on length mismatch or
// a non-positive expected count.
double ChiSquareStatistic(std::span<const uint64_t> observed,
                          std::span<const double> expected);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Series expansion below x = a + 1, Lentz continued fraction above.
double RegularizedGammaP(double a, double x);
double RegularizedGammaQ(double a, double x);

// Upper tail P(X >= statistic) for X ~ chi-square(df).
double ChiSquarePValue(double statistic, int df);

// Full test of a histogram against the uniform expectation; df = bins - 1.
ChiSquareResult ChiSquareUniformTest(const Histogram& histogram);

// Raised when a rekey interval lies outside [base, 2 * base). This is an
// engine invariant breach, not a statistical failure.
class IntervalRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Bins every event's interval_chosen into k equal sub-ranges of
// [base, 2 * base) and tests for uniformity. Requires k >= 2 and at least
// 10 * k events.
ChiSquareResult IntervalUniformityTest(std::span<const RekeyEvent> events,
                                       uint64_t base, size_t k);

}  // namespace rekeyrand

#endif  // REKEYRAND_CHI_SQUARE_H_
