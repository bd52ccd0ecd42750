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

// Test-only reference Keccak written straight from the FIPS 202 step
// definitions. It derives the round constants from the rc(t) LFSR and the
// rotation offsets from the (x, y) walk instead of using tables, works on a
// bit-addressed state, and pads bit by bit. Slow on purpose; it shares no
// code with the production sponge.

#ifndef REX_TESTS_SUPPORT_KECCAK_REFERENCE_HPP_
#define REX_TESTS_SUPPORT_KECCAK_REFERENCE_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rex::testing {

class ReferenceKeccak {
 public:
  // domain_bits: the suffix appended before pad10*1, least significant bit
  // first (Keccak: none; SHA3: "01").
  static std::vector<std::uint8_t> hash256(const std::vector<std::uint8_t>& msg,
                                           const std::string& domain_bits) {
    constexpr int kRate = 1088;
    std::vector<int> bits;
    for (std::uint8_t byte : msg) {
      for (int k = 0; k < 8; ++k) bits.push_back((byte >> k) & 1);
    }
    for (char c : domain_bits) bits.push_back(c == '1');
    // pad10*1
    bits.push_back(1);
    while ((bits.size() + 1) % kRate != 0) bits.push_back(0);
    bits.push_back(1);

    State a{};
    for (std::size_t block = 0; block < bits.size(); block += kRate) {
      for (int i = 0; i < kRate; ++i) {
        const int x = (i / 64) % 5;
        const int y = (i / 64) / 5;
        const int z = i % 64;
        a[idx(x, y, z)] ^= bits[block + i];
      }
      permute(a);
    }
    std::vector<std::uint8_t> out(32, 0);
    for (int i = 0; i < 256; ++i) {
      const int x = (i / 64) % 5;
      const int y = (i / 64) / 5;
      const int z = i % 64;
      out[i / 8] |= static_cast<std::uint8_t>(a[idx(x, y, z)] << (i % 8));
    }
    return out;
  }

 private:
  using State = std::array<int, 1600>;

  static int idx(int x, int y, int z) { return 64 * (5 * y + x) + z; }
  static int mod(int a, int m) { return ((a % m) + m) % m; }

  static int rc(int t) {
    if (mod(t, 255) == 0) return 1;
    std::array<int, 9> r = {1, 0, 0, 0, 0, 0, 0, 0, 0};
    for (int i = 1; i <= mod(t, 255); ++i) {
      // R = 0 || R, then taps at 0, 4, 5, 6 XOR R[8], truncate to 8 bits
      for (int k = 8; k > 0; --k) r[k] = r[k - 1];
      r[0] = 0;
      r[0] ^= r[8];
      r[4] ^= r[8];
      r[5] ^= r[8];
      r[6] ^= r[8];
    }
    return r[0];
  }

  static void permute(State& a) {
    for (int ir = 0; ir < 24; ++ir) {
      // theta
      State b = a;
      for (int x = 0; x < 5; ++x) {
        for (int z = 0; z < 64; ++z) {
          int d = 0;
          for (int y = 0; y < 5; ++y) {
            d ^= a[idx(mod(x - 1, 5), y, z)] ^ a[idx(mod(x + 1, 5), y, mod(z - 1, 64))];
          }
          for (int y = 0; y < 5; ++y) b[idx(x, y, z)] = a[idx(x, y, z)] ^ d;
        }
      }
      a = b;
      // rho
      b = a;
      int x = 1, y = 0;
      for (int t = 0; t < 24; ++t) {
        for (int z = 0; z < 64; ++z) {
          b[idx(x, y, z)] = a[idx(x, y, mod(z - (t + 1) * (t + 2) / 2, 64))];
        }
        const int nx = y;
        const int ny = mod(2 * x + 3 * y, 5);
        x = nx;
        y = ny;
      }
      a = b;
      // pi
      for (int px = 0; px < 5; ++px) {
        for (int py = 0; py < 5; ++py) {
          for (int z = 0; z < 64; ++z) {
            b[idx(px, py, z)] = a[idx(mod(px + 3 * py, 5), px, z)];
          }
        }
      }
      a = b;
      // chi
      for (int cx = 0; cx < 5; ++cx) {
        for (int cy = 0; cy < 5; ++cy) {
          for (int z = 0; z < 64; ++z) {
            b[idx(cx, cy, z)] =
                a[idx(cx, cy, z)] ^
                ((a[idx(mod(cx + 1, 5), cy, z)] ^ 1) & a[idx(mod(cx + 2, 5), cy, z)]);
          }
        }
      }
      a = b;
      // iota
      for (int j = 0; j <= 6; ++j) {
        a[idx(0, 0, (1 << j) - 1)] ^= rc(j + 7 * ir);
      }
    }
  }
};

}  // namespace rex::testing

#endif  // REX_TESTS_SUPPORT_KECCAK_REFERENCE_HPP_
