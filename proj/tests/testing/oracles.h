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

// Test-only oracles, written independently of the library code paths they
// check.

#ifndef REKEYRAND_TESTS_TESTING_ORACLES_H_
#define REKEYRAND_TESTS_TESTING_ORACLES_H_

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace rekeyrand::testing {

// Textbook ChaCha20 block: the state is a 4x4 matrix and each double round
// is expressed as eight index quadruples applied in turn.
inline std::array<uint8_t, 64> NaiveChaChaBlock(
    const std::array<uint8_t, 32>& key, uint32_t counter,
    const std::array<uint8_t, 12>& nonce) {
  auto rotl = [](uint32_t v, int n) -> uint32_t {
    return (v << n) | (v >> (32 - n));
  };
  auto word = [](const uint8_t* p) -> uint32_t {
    uint32_t w = 0;
    for (int i = 3; i >= 0; --i) w = (w << 8) | p[i];
    return w;
  };
  uint32_t m[16];
  const char* sigma = "expand 32-byte k";
  for (int i = 0; i < 4; ++i) {
    m[i] = word(reinterpret_cast<const uint8_t*>(sigma) + 4 * i);
  }
  for (int i = 0; i < 8; ++i) m[4 + i] = word(&key[4 * i]);
  m[12] = counter;
  for (int i = 0; i < 3; ++i) m[13 + i] = word(&nonce[4 * i]);

  uint32_t x[16];
  for (int i = 0; i < 16; ++i) x[i] = m[i];
  static constexpr int kRounds[8][4] = {
      {0, 4, 8, 12}, {1, 5, 9, 13}, {2, 6, 10, 14}, {3, 7, 11, 15},
      {0, 5, 10, 15}, {1, 6, 11, 12}, {2, 7, 8, 13}, {3, 4, 9, 14}};
  for (int round = 0; round < 20; round += 2) {
    for (const auto& q : kRounds) {
      uint32_t& a = x[q[0]];
      uint32_t& b = x[q[1]];
      uint32_t& c = x[q[2]];
      uint32_t& d = x[q[3]];
      a = a + b; d = rotl(d ^ a, 16);
      c = c + d; b = rotl(b ^ c, 12);
      a = a + b; d = rotl(d ^ a, 8);
      c = c + d; b = rotl(b ^ c, 7);
    }
  }
  std::array<uint8_t, 64> out;
  for (int i = 0; i < 16; ++i) {
    const uint32_t v = x[i] + m[i];
    for (int j = 0; j < 4; ++j) out[4 * i + j] = (v >> (8 * j)) & 0xff;
  }
  return out;
}

// Keystream of `n` bytes starting at block `counter`, one naive block at a
// time.
inline std::vector<uint8_t> NaiveKeystream(const std::array<uint8_t, 32>& key,
                                           const std::array<uint8_t, 12>& nonce,
                                           uint32_t counter, size_t n) {
  std::vector<uint8_t> out;
  while (out.size() < n) {
    const auto block = NaiveChaChaBlock(key, counter++, nonce);
    for (uint8_t b : block) {
      if (out.size() == n) break;
      out.push_back(b);
    }
  }
  return out;
}

inline constexpr uint32_t InverseRotl(uint32_t v, int n) {
  return (v >> n) | (v << (32 - n));
}

// Undoes the four lines of the quarter round in reverse order.
inline std::array<uint32_t, 4> InverseQuarterRound(uint32_t a, uint32_t b,
                                                   uint32_t c, uint32_t d) {
  b = InverseRotl(b, 7); b ^= c; c -= d;
  d = InverseRotl(d, 8); d ^= a; a -= b;
  b = InverseRotl(b, 12); b ^= c; c -= d;
  d = InverseRotl(d, 16); d ^= a; a -= b;
  return {a, b, c, d};
}

// Adaptive Simpson quadrature of f over [lo, hi].
inline double AdaptiveSimpson(const std::function<double(double)>& f,
                              double lo, double hi, double tol,
                              int depth = 50) {
  std::function<double(double, double, double, double, double, double, double,
                       int)>
      recurse = [&](double a, double b, double fa, double fm, double fb,
                    double whole, double eps, int level) -> double {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (level <= 0 || std::fabs(delta) <= 15.0 * eps) {
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, eps / 2, level - 1) +
           recurse(m, b, fm, frm, fb, right, eps / 2, level - 1);
  };
  const double fa = f(lo);
  const double fb = f(hi);
  const double fm = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return recurse(lo, hi, fa, fm, fb, whole, tol, depth);
}

// Chi-square upper tail by integrating the density from `statistic` out to a
// point where the remaining mass is negligible.
inline double QuadratureChiSquareTail(double statistic, int df) {
  const double k = 0.5 * df;
  const double log_norm = -k * std::log(2.0) - std::lgamma(k);
  auto density = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(log_norm + (k - 1.0) * std::log(x) - 0.5 * x);
  };
  const double hi = df + 40.0 * std::sqrt(2.0 * df) + 200.0;
  if (statistic >= hi) return 0.0;
  // Split at the mode so each piece is smooth and unimodal at most.
  const double mode = std::max(df - 2.0, 0.0);
  if (statistic < mode) {
    return AdaptiveSimpson(density, statistic, mode, 1e-13) +
           AdaptiveSimpson(density, mode, hi, 1e-13);
  }
  return AdaptiveSimpson(density, statistic, hi, 1e-13);
}

}  // namespace rekeyrand::testing

#endif  // REKEYRAND_TESTS_TESTING_ORACLES_H_
