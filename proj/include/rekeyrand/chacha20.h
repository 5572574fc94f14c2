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

// ChaCha20 stream cipher, IETF layout (RFC 8439): 256-bit key, 32-bit block
// counter, 96-bit nonce. Only the keystream is provided; there is no AEAD.

#ifndef REKEYRAND_CHACHA20_H_
#define REKEYRAND_CHACHA20_H_

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rekeyrand {

inline constexpr size_t kChaChaKeySize = 32;
inline constexpr size_t kChaChaNonceSize = 12;
inline constexpr size_t kChaChaBlockSize = 64;

using ChaChaKey = std::array<uint8_t, kChaChaKeySize>;
using ChaChaNonce = std::array<uint8_t, kChaChaNonceSize>;
using ChaChaBlock = std::array<uint8_t, kChaChaBlockSize>;
using ChaChaWords = std::array<uint32_t, 16>;

struct QuarterRoundWords {
  uint32_t a;
  uint32_t b;
  uint32_t c;
  uint32_t d;

  friend bool operator==(const QuarterRoundWords&,
                         const QuarterRoundWords&) = default;
};

constexpr QuarterRoundWords QuarterRound(uint32_t a, uint32_t b, uint32_t c,
                                         uint32_t d) {
  a += b; d ^= a; d = std::rotl(d, 16);
  c += d; b ^= c; b = std::rotl(b, 12);
  a += b; d ^= a; d = std::rotl(d, 8);
  c += d; b ^= c; b = std::rotl(b, 7);
  return {a, b, c, d};
}

// Initial 4x4 state matrix: constants, key, counter, nonce.
ChaChaWords ChaChaInitialState(const ChaChaKey& key, uint32_t counter,
                               const ChaChaNonce& nonce);

// 20 rounds plus feed-forward over `state`, serialized little-endian.
void ChaChaBlockFromState(const ChaChaWords& state,
                          std::span<uint8_t, kChaChaBlockSize> out);

ChaChaBlock ChaChaBlockFunction(const ChaChaKey& key, uint32_t counter,
                                const ChaChaNonce& nonce);

// Raised when producing more keystream would wrap the 32-bit block counter.
class CounterExhaustedError : public std::runtime_error {
 public:
  CounterExhaustedError();
};

// Keystream context. Owns a copy of the key and wipes it on destruction.
//
// Keystream bytes are produced in order with no byte skipped or repeated:
// the unused tail of the most recent block is served before the next block is
// generated, so any split of a request yields the same bytes.
class ChaCha20 {
 public:
  ChaCha20(const ChaChaKey& key, const ChaChaNonce& nonce,
           uint32_t initial_counter = 0);
  ChaCha20(const ChaCha20&) = default;
  ChaCha20& operator=(const ChaCha20&) = default;
  ~ChaCha20();

  // Replaces key and nonce, discards buffered keystream.
  void Reset(const ChaChaKey& key, const ChaChaNonce& nonce,
             uint32_t counter = 0);

  // out[i] = in[i] ^ keystream[i]. `in` and `out` must have equal sizes and
  // may be the same buffer. Throws CounterExhaustedError (leaving the context
  // untouched) if the request needs a block past counter 2^32 - 1.
  void XorKeystream(std::span<const uint8_t> in, std::span<uint8_t> out);

  // Writes raw keystream.
  void Keystream(std::span<uint8_t> out);

  std::vector<uint8_t> Xor(std::span<const uint8_t> data);

  // Advances the stream by `n` bytes without materializing them, except for
  // the block that ends up partially consumed.
  void Skip(uint64_t n);

  // Keystream bytes still available before the counter would wrap.
  uint64_t BytesRemaining() const;

  const ChaChaKey& key() const { return key_; }
  const ChaChaNonce& nonce() const { return nonce_; }
  // Counter of the next block to be generated. 2^32 once exhausted.
  uint64_t next_block() const { return next_block_; }
  // Unused keystream bytes held from the last generated block.
  std::span<const uint8_t> partial() const {
    return std::span<const uint8_t>(block_).subspan(kChaChaBlockSize -
                                                    partial_len_);
  }

 private:
  void Wipe();
  void CheckAvailable(uint64_t n) const;
  void NextBlock(std::span<uint8_t, kChaChaBlockSize> out);

  ChaChaKey key_;
  ChaChaNonce nonce_;
  ChaChaWords state_;
  uint64_t next_block_ = 0;
  ChaChaBlock block_{};
  size_t partial_len_ = 0;
};

}  // namespace rekeyrand

#endif  // REKEYRAND_CHACHA20_H_
