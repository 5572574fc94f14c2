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

// arc4random-style generator: ChaCha20 keystream served through a 1 KiB
// buffer, with fast-key-erasure rekeying after a byte budget is spent.
//
// The budget ("rekey interval") comes from a RekeyPolicy. The fixed policy
// reproduces the classic constant of 1,600,000 bytes. The fuzzed policy draws
// a 32-bit word from the freshly keyed cipher after every rekey and sets the
// budget to base + (word % base), so the interval is not predictable from the
// outside.
//
// Rekeys happen at exact output offsets: a request that crosses the budget is
// split internally, and the rekey runs as soon as the budget reaches zero.
// The output stream therefore depends only on (seed, policy), never on how
// callers chunk their requests.

#ifndef REKEYRAND_RAND_STATE_H_
#define REKEYRAND_RAND_STATE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rekeyrand/chacha20.h"

namespace rekeyrand {

inline constexpr size_t kSeedSize = kChaChaKeySize + kChaChaNonceSize;  // 44
inline constexpr size_t kBufSize = 1024;
inline constexpr size_t kRefillSize = kBufSize - kSeedSize;  // 980

inline constexpr uint64_t kDefaultFixedInterval = 1'600'000;
inline constexpr uint64_t kDefaultRekeyBase = uint64_t{1} << 20;

// Largest accepted fixed interval or 2 * base. Well inside the 2^38 bytes a
// single ChaCha20 key can produce.
inline constexpr uint64_t kMaxInterval = uint64_t{1} << 36;

using Seed = std::array<uint8_t, kSeedSize>;

// Parses exactly 88 hex characters. Throws std::invalid_argument otherwise.
Seed ParseSeedHex(std::string_view hex);
std::string SeedToHex(const Seed& seed);

struct RekeyPolicy {
  enum class Mode { kFixed, kFuzzed };

  Mode mode = Mode::kFixed;
  uint64_t fixed_interval = kDefaultFixedInterval;
  uint64_t rekey_base = kDefaultRekeyBase;

  static RekeyPolicy Fixed(uint64_t interval = kDefaultFixedInterval);
  static RekeyPolicy Fuzzed(uint64_t base = kDefaultRekeyBase);

  // Throws std::invalid_argument for a zero or oversized interval/base.
  void Validate() const;

  // "fixed:1600000" or "fuzzed:1048576".
  std::string Describe() const;

  friend bool operator==(const RekeyPolicy&, const RekeyPolicy&) = default;
};

// base + (rekey_fuzz % base). Always in [base, 2 * base - 1].
uint64_t FuzzedInterval(uint64_t base, uint32_t rekey_fuzz);

// Interval for the next rekey period. For the fuzzed policy this draws the
// fuzz word by encrypting four zero bytes through `cipher` (advancing it) and
// reading them little-endian; `cipher` must already hold the new key.
uint64_t ComputeRekeyInterval(const RekeyPolicy& policy, ChaCha20& cipher);

struct RekeyEvent {
  uint64_t ordinal;
  uint64_t output_offset;
  uint64_t interval_chosen;

  friend bool operator==(const RekeyEvent&, const RekeyEvent&) = default;
};

// "ordinal,output_offset,interval_chosen" header plus one row per event.
std::string RekeyEventsToCsv(std::span<const RekeyEvent> events);

class SeedSourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SeedSource {
 public:
  virtual ~SeedSource() = default;
  // Exactly kSeedSize bytes, or throws SeedSourceError.
  virtual Seed Generate() = 0;
};

// Kernel entropy via getrandom(2).
class OsSeedSource : public SeedSource {
 public:
  Seed Generate() override;
};

class FixedSeedSource : public SeedSource {
 public:
  explicit FixedSeedSource(const Seed& seed) : seed_(seed) {}
  Seed Generate() override { return seed_; }

 private:
  Seed seed_;
};

class RandState {
 public:
  // Keys the cipher from `seed` and performs the initial rekey, logged as
  // event 0 at output offset 0. Throws std::invalid_argument if the policy
  // is invalid.
  RandState(const Seed& seed, const RekeyPolicy& policy,
            bool record_events = true);
  RandState(const RandState&) = default;
  RandState& operator=(const RandState&) = default;
  ~RandState();

  void RandomBuf(std::span<uint8_t> out);
  std::vector<uint8_t> RandomBytes(size_t n);
  uint32_t RandomU32();

  // Same state transition as RandomBuf over `n` bytes, without producing
  // the bytes. Whole buffer refills are skipped in the cipher, so long
  // stretches between rekeys cost O(1).
  void Discard(uint64_t n);

  // Fast-key-erasure rekey: fills the buffer from the current cipher, keys
  // the cipher from its first kSeedSize bytes, zeroes them, and sets the next
  // budget from the policy.
  void Rekey();

  // XORs fresh seed bytes into the current key and nonce and forces a rekey.
  // If `source` throws, the error propagates and the state is unchanged.
  void Reseed(SeedSource& source);

  // Raw byte image of every secret-bearing field: cipher key, nonce, next
  // block counter, buffered partial block, buffer, have, count, total_out.
  std::vector<uint8_t> Serialize() const;

  const RekeyPolicy& policy() const { return policy_; }
  const ChaCha20& cipher() const { return cipher_; }
  std::span<const uint8_t, kBufSize> buffer() const { return buf_; }
  size_t have() const { return have_; }
  int64_t count() const { return count_; }
  uint64_t total_out() const { return total_out_; }
  uint64_t rekey_count() const { return rekey_count_; }
  const std::vector<RekeyEvent>& events() const { return events_; }

 private:
  void Refill();
  void Consume(size_t n, uint8_t* out);

  RekeyPolicy policy_;
  ChaCha20 cipher_;
  std::array<uint8_t, kBufSize> buf_{};
  size_t have_ = 0;
  // Signed so an overshooting budget would be representable; requests are
  // split at the boundary, so it stays in [0, interval].
  int64_t count_ = 0;
  uint64_t total_out_ = 0;
  uint64_t rekey_count_ = 0;
  bool record_events_;
  std::vector<RekeyEvent> events_;
};

}  // namespace rekeyrand

#endif  // REKEYRAND_RAND_STATE_H_
