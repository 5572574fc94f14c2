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

// Unbiased bounded integers by rejection sampling, arc4random_uniform style.
//
// A draw r is accepted when r >= (2^w - bound) % bound. The accepted range
// then holds an exact multiple of `bound` values and r % bound is uniform.
// The width w is a parameter so the algorithm can be checked exhaustively on
// small words; production draws are 32-bit.

#ifndef REKEYRAND_UNIFORM_H_
#define REKEYRAND_UNIFORM_H_

#include <cstdint>
#include <stdexcept>

#include "rekeyrand/rand_state.h"

namespace rekeyrand {

inline constexpr uint64_t WordMask(unsigned width) {
  return (uint64_t{1} << width) - 1;
}

// (2^width - bound) % bound, computed as (-bound mod 2^width) % bound so the
// width-bit word never has to hold 2^width. Requires 1 <= bound <= 2^width.
inline constexpr uint64_t MinAccept(uint64_t bound, unsigned width) {
  return ((~bound + 1) & WordMask(width)) % bound;
}

// Returns a value in [0, bound); 0 without drawing when bound < 2.
// `draw` yields words whose low `width` bits are used. If `rejections` is
// non-null it is incremented once per discarded draw.
template <typename Draw>
uint64_t UniformGeneric(Draw&& draw, uint64_t bound, unsigned width,
                        uint64_t* rejections = nullptr) {
  if (width < 1 || width > 32) {
    throw std::invalid_argument("word width must be in [1, 32]");
  }
  if (bound > (uint64_t{1} << width)) {
    throw std::invalid_argument("bound exceeds 2^width");
  }
  if (bound < 2) return 0;
  const uint64_t min_accept = MinAccept(bound, width);
  for (;;) {
    const uint64_t r = static_cast<uint64_t>(draw()) & WordMask(width);
    if (r >= min_accept) return r % bound;
    if (rejections != nullptr) ++*rejections;
  }
}

inline uint32_t Uniform(RandState& state, uint32_t upper_bound,
                        uint64_t* rejections = nullptr) {
  if (upper_bound < 2) return 0;
  const uint32_t min_accept = -upper_bound % upper_bound;
  for (;;) {
    const uint32_t r = state.RandomU32();
    if (r >= min_accept) return r % upper_bound;
    if (rejections != nullptr) ++*rejections;
  }
}

}  // namespace rekeyrand

#endif  // REKEYRAND_UNIFORM_H_
