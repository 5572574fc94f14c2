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

#include "rekeyrand/rand_state.h"

#include <sys/random.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <sstream>

#include "rekeyrand/bytes.h"

namespace rekeyrand {
namespace {

ChaChaKey KeyFrom(std::span<const uint8_t> bytes) {
  ChaChaKey key;
  std::copy_n(bytes.begin(), kChaChaKeySize, key.begin());
  return key;
}

ChaChaNonce NonceFrom(std::span<const uint8_t> bytes) {
  ChaChaNonce nonce;
  std::copy_n(bytes.begin() + kChaChaKeySize, kChaChaNonceSize, nonce.begin());
  return nonce;
}

void AppendLe64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

}  // namespace

Seed ParseSeedHex(std::string_view hex) {
  if (hex.size() != 2 * kSeedSize) {
    throw std::invalid_argument("seed must be exactly " +
                                std::to_string(2 * kSeedSize) +
                                " hex characters");
  }
  std::vector<uint8_t> bytes = FromHex(hex);
  Seed seed;
  std::copy(bytes.begin(), bytes.end(), seed.begin());
  return seed;
}

std::string SeedToHex(const Seed& seed) { return ToHex(seed); }

RekeyPolicy RekeyPolicy::Fixed(uint64_t interval) {
  RekeyPolicy p;
  p.mode = Mode::kFixed;
  p.fixed_interval = interval;
  return p;
}

RekeyPolicy RekeyPolicy::Fuzzed(uint64_t base) {
  RekeyPolicy p;
  p.mode = Mode::kFuzzed;
  p.rekey_base = base;
  return p;
}

void RekeyPolicy::Validate() const {
  if (mode == Mode::kFixed) {
    if (fixed_interval == 0 || fixed_interval > kMaxInterval) {
      throw std::invalid_argument("fixed interval must be in [1, 2^36]");
    }
  } else {
    // The fuzz word is 32 bits wide; a larger base could not reach the top
    // half of [base, 2 * base).
    if (rekey_base == 0 || rekey_base > (uint64_t{1} << 32) ||
        2 * rekey_base > kMaxInterval) {
      throw std::invalid_argument("rekey base must be in [1, 2^32]");
    }
  }
}

std::string RekeyPolicy::Describe() const {
  return mode == Mode::kFixed ? "fixed:" + std::to_string(fixed_interval)
                              : "fuzzed:" + std::to_string(rekey_base);
}

uint64_t FuzzedInterval(uint64_t base, uint32_t rekey_fuzz) {
  return base + rekey_fuzz % base;
}

uint64_t ComputeRekeyInterval(const RekeyPolicy& policy, ChaCha20& cipher) {
  if (policy.mode == RekeyPolicy::Mode::kFixed) return policy.fixed_interval;
  std::array<uint8_t, 4> fuzz{};
  cipher.XorKeystream(fuzz, fuzz);
  const uint32_t rekey_fuzz = LoadLe32(fuzz.data());
  SecureZero(fuzz);
  return FuzzedInterval(policy.rekey_base, rekey_fuzz);
}

std::string RekeyEventsToCsv(std::span<const RekeyEvent> events) {
  std::ostringstream out;
  out << "ordinal,output_offset,interval_chosen\n";
  for (const RekeyEvent& e : events) {
    out << e.ordinal << ',' << e.output_offset << ',' << e.interval_chosen
        << '\n';
  }
  return out.str();
}

Seed OsSeedSource::Generate() {
  Seed seed;
  size_t filled = 0;
  while (filled < seed.size()) {
    ssize_t r = getrandom(seed.data() + filled, seed.size() - filled, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw SeedSourceError(std::string("getrandom: ") + std::strerror(errno));
    }
    filled += static_cast<size_t>(r);
  }
  return seed;
}

RandState::RandState(const Seed& seed, const RekeyPolicy& policy,
                     bool record_events)
    : policy_(policy),
      cipher_(KeyFrom(seed), NonceFrom(seed)),
      record_events_(record_events) {
  policy_.Validate();
  Rekey();
}

RandState::~RandState() { SecureZero(buf_); }

void RandState::Rekey() {
  cipher_.Keystream(buf_);
  ChaChaKey key = KeyFrom(buf_);
  ChaChaNonce nonce = NonceFrom(buf_);
  cipher_.Reset(key, nonce, 0);
  SecureZero(key);
  SecureZero(nonce);
  SecureZero(std::span(buf_).first(kSeedSize));
  have_ = kRefillSize;

  const uint64_t interval = ComputeRekeyInterval(policy_, cipher_);
  count_ = static_cast<int64_t>(interval);
  if (record_events_) {
    events_.push_back({rekey_count_, total_out_, interval});
  }
  ++rekey_count_;
}

void RandState::Refill() {
  cipher_.Keystream(std::span(buf_).subspan(kSeedSize));
  have_ = kRefillSize;
}

void RandState::Consume(size_t n, uint8_t* out) {
  uint8_t* src = buf_.data() + kBufSize - have_;
  if (out != nullptr) std::memcpy(out, src, n);
  std::memset(src, 0, n);
  have_ -= n;
  count_ -= static_cast<int64_t>(n);
  total_out_ += n;
}

void RandState::RandomBuf(std::span<uint8_t> out) {
  uint8_t* p = out.data();
  size_t n = out.size();
  while (n > 0) {
    if (have_ == 0) Refill();
    const size_t m =
        std::min({n, have_, static_cast<size_t>(count_)});
    Consume(m, p);
    p += m;
    n -= m;
    if (count_ == 0) Rekey();
  }
}

std::vector<uint8_t> RandState::RandomBytes(size_t n) {
  std::vector<uint8_t> out(n);
  RandomBuf(out);
  return out;
}

uint32_t RandState::RandomU32() {
  uint8_t bytes[4];
  if (have_ >= 4 && count_ > 4) {
    Consume(4, bytes);
  } else {
    RandomBuf(bytes);
  }
  return LoadLe32(bytes);
}

void RandState::Discard(uint64_t n) {
  while (n > 0) {
    const uint64_t step = std::min(n, static_cast<uint64_t>(count_));
    const size_t take = static_cast<size_t>(std::min<uint64_t>(step, have_));
    Consume(take, nullptr);
    uint64_t rest = step - take;
    if (rest > 0) {
      const uint64_t skipped = rest - rest % kRefillSize;
      cipher_.Skip(skipped);
      count_ -= static_cast<int64_t>(skipped);
      total_out_ += skipped;
      rest -= skipped;
      if (rest > 0) {
        Refill();
        Consume(static_cast<size_t>(rest), nullptr);
      }
    }
    n -= step;
    if (count_ == 0) Rekey();
  }
}

void RandState::Reseed(SeedSource& source) {
  Seed fresh = source.Generate();
  ChaChaKey key = cipher_.key();
  ChaChaNonce nonce = cipher_.nonce();
  for (size_t i = 0; i < kChaChaKeySize; ++i) key[i] ^= fresh[i];
  for (size_t i = 0; i < kChaChaNonceSize; ++i) {
    nonce[i] ^= fresh[kChaChaKeySize + i];
  }
  // Continue from the next unused block so an all-zero reseed never replays
  // keystream already handed out.
  cipher_.Reset(key, nonce, static_cast<uint32_t>(cipher_.next_block()));
  SecureZero(key);
  SecureZero(nonce);
  SecureZero(fresh);
  Rekey();
}

std::vector<uint8_t> RandState::Serialize() const {
  std::vector<uint8_t> out;
  out.reserve(kSeedSize + 8 + kChaChaBlockSize + kBufSize + 24);
  out.insert(out.end(), cipher_.key().begin(), cipher_.key().end());
  out.insert(out.end(), cipher_.nonce().begin(), cipher_.nonce().end());
  AppendLe64(out, cipher_.next_block());
  out.insert(out.end(), cipher_.partial().begin(), cipher_.partial().end());
  out.insert(out.end(), buf_.begin(), buf_.end());
  AppendLe64(out, have_);
  AppendLe64(out, static_cast<uint64_t>(count_));
  AppendLe64(out, total_out_);
  return out;
}

}  // namespace rekeyrand
