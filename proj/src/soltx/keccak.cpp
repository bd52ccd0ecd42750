// Copyright 2026 The rex Authors.
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

#include "rex/soltx/keccak.hpp"

#include <bit>
#include <cstring>

namespace rex::soltx {

namespace {

constexpr std::size_t kRateBytes = 136;  // 1600 - 2*256 bits
constexpr int kRounds = 24;

constexpr std::array<std::uint64_t, kRounds> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// Rotation offsets and lane permutation in pi-order, starting from lane 1.
constexpr std::array<int, 24> kRho = {1,  3,  6,  10, 15, 21, 28, 36,
                                      45, 55, 2,  14, 27, 41, 56, 8,
                                      25, 43, 62, 18, 39, 61, 20, 44};
constexpr std::array<int, 24> kPi = {10, 7,  11, 17, 18, 3,  5,  16,
                                     8,  21, 24, 4,  15, 23, 19, 13,
                                     12, 2,  20, 14, 22, 9,  6,  1};

void keccak_f1600(std::array<std::uint64_t, 25>& a) {
  for (int round = 0; round < kRounds; ++round) {
    // theta
    std::uint64_t c[5];
    for (int x = 0; x < 5; ++x) {
      c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
    }
    for (int x = 0; x < 5; ++x) {
      const std::uint64_t d = c[(x + 4) % 5] ^ std::rotl(c[(x + 1) % 5], 1);
      for (int y = 0; y < 25; y += 5) a[y + x] ^= d;
    }
    // rho + pi
    std::uint64_t carry = a[1];
    for (int i = 0; i < 24; ++i) {
      const int j = kPi[i];
      const std::uint64_t tmp = a[j];
      a[j] = std::rotl(carry, kRho[i]);
      carry = tmp;
    }
    // chi
    for (int y = 0; y < 25; y += 5) {
      std::uint64_t row[5];
      for (int x = 0; x < 5; ++x) row[x] = a[y + x];
      for (int x = 0; x < 5; ++x) {
        a[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
      }
    }
    // iota
    a[0] ^= kRoundConstants[round];
  }
}

std::uint64_t load_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void absorb_block(std::array<std::uint64_t, 25>& state,
                  const std::uint8_t* block) {
  for (std::size_t i = 0; i < kRateBytes / 8; ++i) {
    state[i] ^= load_le64(block + 8 * i);
  }
  keccak_f1600(state);
}

Digest256 sponge256(std::span<const std::uint8_t> data, std::uint8_t domain) {
  std::array<std::uint64_t, 25> state{};
  std::size_t offset = 0;
  while (data.size() - offset >= kRateBytes) {
    absorb_block(state, data.data() + offset);
    offset += kRateBytes;
  }
  std::uint8_t last[kRateBytes] = {};
  const std::size_t rem = data.size() - offset;
  if (rem > 0) std::memcpy(last, data.data() + offset, rem);
  last[rem] ^= domain;
  last[kRateBytes - 1] ^= 0x80;
  absorb_block(state, last);

  std::array<std::uint8_t, Digest256::kSize> out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(state[i / 8] >> (8 * (i % 8)));
  }
  return Digest256(out);
}

std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

std::string Digest256::to_hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(kSize * 2);
  for (std::uint8_t b : bytes_) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

unsigned Digest256::nibble(std::size_t i) const {
  const std::uint8_t b = bytes_[i / 2];
  return (i % 2 == 0) ? (b >> 4) : (b & 0xF);
}

Digest256 keccak256(std::span<const std::uint8_t> data) {
  return sponge256(data, 0x01);
}

Digest256 keccak256(std::string_view data) { return keccak256(as_bytes(data)); }

Digest256 sha3_256(std::span<const std::uint8_t> data) {
  return sponge256(data, 0x06);
}

Digest256 sha3_256(std::string_view data) { return sha3_256(as_bytes(data)); }

}  // namespace rex::soltx
