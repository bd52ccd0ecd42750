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

#ifndef REX_SOLTX_KECCAK_HPP_
#define REX_SOLTX_KECCAK_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace rex::soltx {

class Digest256 {
 public:
  static constexpr std::size_t kSize = 32;

  Digest256() = default;
  explicit Digest256(const std::array<std::uint8_t, kSize>& bytes)
      : bytes_(bytes) {}

  const std::array<std::uint8_t, kSize>& bytes() const { return bytes_; }
  std::uint8_t operator[](std::size_t i) const { return bytes_[i]; }

  // Lowercase, no 0x prefix.
  std::string to_hex() const;

  // i-th hex nibble of the digest, most significant first (0..63).
  unsigned nibble(std::size_t i) const;

  friend bool operator==(const Digest256&, const Digest256&) = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

// Ethereum Keccak-256: rate 136 bytes, original padding (domain byte 0x01).
Digest256 keccak256(std::span<const std::uint8_t> data);
Digest256 keccak256(std::string_view data);

// FIPS 202 SHA3-256 over the same permutation (domain byte 0x06). Exposed so
// the permutation can be cross-checked against other SHA3 implementations.
Digest256 sha3_256(std::span<const std::uint8_t> data);
Digest256 sha3_256(std::string_view data);

}  // namespace rex::soltx

#endif  // REX_SOLTX_KECCAK_HPP_
