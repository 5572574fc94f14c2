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

#include "rekeyrand/chi_square.h"

#include <cmath>
#include <limits>

#include "json.hpp"

namespace rekeyrand {
namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// exp(-x + a ln x - lgamma(a)), the common prefactor of P and Q.
double GammaPrefactor(double a, double x) {
  return std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double GammaSeries(double a, double x) {
  double denom = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIterations; ++n) {
    denom += 1.0;
    term *= x / denom;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEpsilon) break;
  }
  return sum * GammaPrefactor(a, x);
}

double GammaContinuedFraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return GammaPrefactor(a, x) * h;
}

void CheckGammaArgs(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isinf(a)) {
    throw std::invalid_argument("incomplete gamma needs a > 0 and x >= 0");
  }
}

}  // namespace

Histogram::Histogram(size_t k, uint64_t lo, uint64_t hi, bool categorical)
    : bins_(k, 0), lo_(lo), hi_(hi), categorical_(categorical) {}

Histogram Histogram::Categorical(size_t k) {
  if (k == 0) throw std::invalid_argument("histogram needs at least one bin");
  return Histogram(k, 0, k, true);
}

Histogram Histogram::RangePartition(uint64_t lo, uint64_t hi, size_t k) {
  if (k == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (hi <= lo || hi - lo < k) {
    throw std::invalid_argument("range must hold at least one value per bin");
  }
  return Histogram(k, lo, hi, false);
}

size_t Histogram::BinOf(uint64_t value) const {
  if (value < lo_ || value >= hi_) {
    throw std::out_of_range("value " + std::to_string(value) +
                            " outside histogram range [" +
                            std::to_string(lo_) + ", " + std::to_string(hi_) +
                            ")");
  }
  if (categorical_) return static_cast<size_t>(value);
  const unsigned __int128 scaled =
      static_cast<unsigned __int128>(value - lo_) * bins_.size();
  return static_cast<size_t>(scaled / (hi_ - lo_));
}

uint64_t Histogram::BinWidth(size_t bin) const {
  if (categorical_) return 1;
  const unsigned __int128 width = hi_ - lo_;
  const unsigned __int128 k = bins_.size();
  // Values v with floor(v * k / W) == bin: [ceil(bin W / k), ceil((bin+1) W / k)).
  auto ceil_div = [&](unsigned __int128 i) { return (i * width + k - 1) / k; };
  return static_cast<uint64_t>(ceil_div(bin + 1) - ceil_div(bin));
}

void Histogram::Add(uint64_t value) {
  ++bins_[BinOf(value)];
  ++total_;
}

std::vector<double> Histogram::UniformExpectation() const {
  std::vector<double> expected(bins_.size());
  const double per_value =
      static_cast<double>(total_) / static_cast<double>(hi_ - lo_);
  for (size_t i = 0; i < bins_.size(); ++i) {
    expected[i] = per_value * static_cast<double>(BinWidth(i));
  }
  return expected;
}

std::string ChiSquareResult::ToJson() const {
  nlohmann::ordered_json j;
  j["statistic"] = statistic;
  j["df"] = df;
  j["p_value"] = p_value;
  return j.dump();
}

double ChiSquareStatistic(std::span<const uint64_t> observed,
                          std::span<const double> expected) {
  if (observed.size() != expected.size()) {
    throw std::invalid_argument("observed and expected bin counts differ");
  }
  double statistic = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) {
      throw std::invalid_argument("expected counts must be positive");
    }
    const double diff = static_cast<double>(observed[i]) - expected[i];
    statistic += diff * diff / expected[i];
  }
  return statistic;
}

double RegularizedGammaP(double a, double x) {
  CheckGammaArgs(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return GammaSeries(a, x);
  return 1.0 - GammaContinuedFraction(a, x);
}

double RegularizedGammaQ(double a, double x) {
  CheckGammaArgs(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - GammaSeries(a, x);
  return GammaContinuedFraction(a, x);
}

double ChiSquarePValue(double statistic, int df) {
  if (df < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
  if (!(statistic >= 0.0)) {
    throw std::invalid_argument("chi-square statistic must be >= 0");
  }
  if (std::isinf(statistic)) return 0.0;
  return RegularizedGammaQ(0.5 * df, 0.5 * statistic);
}

ChiSquareResult ChiSquareUniformTest(const Histogram& histogram) {
  if (histogram.size() < 2) {
    throw std::invalid_argument("chi-square test needs at least two bins");
  }
  const std::vector<double> expected = histogram.UniformExpectation();
  const double statistic = ChiSquareStatistic(histogram.bins(), expected);
  const int df = static_cast<int>(histogram.size() - 1);
  return {statistic, df, ChiSquarePValue(statistic, df)};
}

ChiSquareResult IntervalUniformityTest(std::span<const RekeyEvent> events,
                                       uint64_t base, size_t k) {
  if (k < 2) throw std::invalid_argument("need at least two bins");
  if (events.size() < 10 * k) {
    throw std::invalid_argument("need at least 10 events per bin");
  }
  Histogram histogram = Histogram::RangePartition(base, 2 * base, k);
  for (const RekeyEvent& e : events) {
    if (e.interval_chosen < base || e.interval_chosen >= 2 * base) {
      throw IntervalRangeError("rekey " + std::to_string(e.ordinal) +
                               " chose interval " +
                               std::to_string(e.interval_chosen) +
                               " outside [base, 2 * base)");
    }
    histogram.Add(e.interval_chosen);
  }
  return ChiSquareUniformTest(histogram);
}

}  // namespace rekeyrand
