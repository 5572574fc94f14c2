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

#include "rekeyrand/chacha20.h"

#include <algorithm>
#include <cstring>

#include "rekeyrand/bytes.h"

namespace rekeyrand {
namespace {

constexpr uint64_t kCounterLimit = uint64_t{1} << 32;

// "expand 32-byte k"
constexpr uint32_t kSigma[4] = {0x61707865, 0x3320646e, 0x79622d32,
                                0x6b206574};

#define REKEYRAND_QR(a, b, c, d)            \
  a += b; d ^= a; d = std::rotl(d, 16); \
  c += d; b ^= c; b = std::rotl(b, 12); \
  a += b; d ^= a; d = std::rotl(d, 8);  \
  c += d; b ^= c; b = std::rotl(b, 7)

}  // namespace

ChaChaWords ChaChaInitialState(const ChaChaKey& key, uint32_t counter,
                               const ChaChaNonce& nonce) {
  ChaChaWords s;
  for (int i = 0; i < 4; ++i) s[i] = kSigma[i];
  for (int i = 0; i < 8; ++i) s[4 + i] = LoadLe32(key.data() + 4 * i);
  s[12] = counter;
  for (int i = 0; i < 3; ++i) s[13 + i] = LoadLe32(nonce.data() + 4 * i);
  return s;
}

void ChaChaBlockFromState(const ChaChaWords& state,
                          std::span<uint8_t, kChaChaBlockSize> out) {
  uint32_t x0 = state[0], x1 = state[1], x2 = state[2], x3 = state[3];
  uint32_t x4 = state[4], x5 = state[5], x6 = state[6], x7 = state[7];
  uint32_t x8 = state[8], x9 = state[9], x10 = state[10], x11 = state[11];
  uint32_t x12 = state[12], x13 = state[13], x14 = state[14], x15 = state[15];
  for (int i = 0; i < 10; ++i) {
    REKEYRAND_QR(x0, x4, x8, x12);
    REKEYRAND_QR(x1, x5, x9, x13);
    REKEYRAND_QR(x2, x6, x10, x14);
    REKEYRAND_QR(x3, x7, x11, x15);
    REKEYRAND_QR(x0, x5, x10, x15);
    REKEYRAND_QR(x1, x6, x11, x12);
    REKEYRAND_QR(x2, x7, x8, x13);
    REKEYRAND_QR(x3, x4, x9, x14);
  }
  const uint32_t x[16] = {x0, x1, x2,  x3,  x4,  x5,  x6,  x7,
                          x8, x9, x10, x11, x12, x13, x14, x15};
  for (int i = 0; i < 16; ++i) StoreLe32(out.data() + 4 * i, x[i] + state[i]);
}

#undef REKEYRAND_QR

ChaChaBlock ChaChaBlockFunction(const ChaChaKey& key, uint32_t counter,
                                const ChaChaNonce& nonce) {
  ChaChaBlock out;
  ChaChaBlockFromState(ChaChaInitialState(key, counter, nonce), out);
  return out;
}

CounterExhaustedError::CounterExhaustedError()
    : std::runtime_error("chacha20: block counter exhausted") {}

ChaCha20::ChaCha20(const ChaChaKey& key, const ChaChaNonce& nonce,
                   uint32_t initial_counter) {
  Reset(key, nonce, initial_counter);
}

ChaCha20::~ChaCha20() { Wipe(); }

void ChaCha20::Wipe() {
  SecureZero(key_);
  SecureZero(nonce_);
  SecureZero(std::span<uint8_t>(reinterpret_cast<uint8_t*>(state_.data()),
                                sizeof(state_)));
  SecureZero(block_);
  partial_len_ = 0;
}

void ChaCha20::Reset(const ChaChaKey& key, const ChaChaNonce& nonce,
                     uint32_t counter) {
  if (&key != &key_) key_ = key;
  if (&nonce != &nonce_) nonce_ = nonce;
  state_ = ChaChaInitialState(key_, counter, nonce_);
  next_block_ = counter;
  SecureZero(block_);
  partial_len_ = 0;
}

uint64_t ChaCha20::BytesRemaining() const {
  return partial_len_ + (kCounterLimit - next_block_) * kChaChaBlockSize;
}

void ChaCha20::CheckAvailable(uint64_t n) const {
  if (n > BytesRemaining()) throw CounterExhaustedError();
}

void ChaCha20::NextBlock(std::span<uint8_t, kChaChaBlockSize> out) {
  state_[12] = static_cast<uint32_t>(next_block_);
  ChaChaBlockFromState(state_, out);
  ++next_block_;
}

void ChaCha20::XorKeystream(std::span<const uint8_t> in,
                            std::span<uint8_t> out) {
  if (in.size() != out.size()) {
    throw std::invalid_argument("chacha20: input and output sizes differ");
  }
  const size_t n = in.size();
  CheckAvailable(n);

  size_t i = std::min(n, partial_len_);
  const uint8_t* ks = block_.data() + kChaChaBlockSize - partial_len_;
  for (size_t j = 0; j < i; ++j) out[j] = in[j] ^ ks[j];
  partial_len_ -= i;

  ChaChaBlock tmp;
  while (n - i >= kChaChaBlockSize) {
    NextBlock(tmp);
    for (size_t j = 0; j < kChaChaBlockSize; ++j) {
      out[i + j] = in[i + j] ^ tmp[j];
    }
    i += kChaChaBlockSize;
  }
  SecureZero(tmp);

  if (i < n) {
    NextBlock(block_);
    const size_t r = n - i;
    for (size_t j = 0; j < r; ++j) out[i + j] = in[i + j] ^ block_[j];
    partial_len_ = kChaChaBlockSize - r;
  }
}

void ChaCha20::Keystream(std::span<uint8_t> out) {
  const size_t n = out.size();
  CheckAvailable(n);

  size_t i = std::min(n, partial_len_);
  std::memcpy(out.data(), block_.data() + kChaChaBlockSize - partial_len_, i);
  partial_len_ -= i;

  while (n - i >= kChaChaBlockSize) {
    NextBlock(out.subspan(i).first<kChaChaBlockSize>());
    i += kChaChaBlockSize;
  }

  if (i < n) {
    NextBlock(block_);
    const size_t r = n - i;
    std::memcpy(out.data() + i, block_.data(), r);
    partial_len_ = kChaChaBlockSize - r;
  }
}

std::vector<uint8_t> ChaCha20::Xor(std::span<const uint8_t> data) {
  std::vector<uint8_t> out(data.size());
  XorKeystream(data, out);
  return out;
}

void ChaCha20::Skip(uint64_t n) {
  CheckAvailable(n);
  const uint64_t take = std::min<uint64_t>(n, partial_len_);
  partial_len_ -= take;
  n -= take;
  next_block_ += n / kChaChaBlockSize;
  const size_t r = n % kChaChaBlockSize;
  if (r != 0) {
    NextBlock(block_);
    partial_len_ = kChaChaBlockSize - r;
  }
}

}  // namespace rekeyrand
