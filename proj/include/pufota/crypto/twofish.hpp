// Copyright 2026 The pufota Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy of
// the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations under
// the License.

#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace pufota::crypto {

// Twofish with a 128-bit key (k = 2). Words are little-endian as in the
// reference implementation, so the published ECB tables apply byte-for-byte.
class Twofish128 {
 public:
  static constexpr std::size_t kBlockBytes = 16;
  static constexpr std::size_t kKeyBytes = 16;

  explicit Twofish128(std::span<const std::uint8_t, kKeyBytes> key);

  void encrypt_block(std::span<std::uint8_t, kBlockBytes> block) const;
  void decrypt_block(std::span<std::uint8_t, kBlockBytes> block) const;

 private:
  std::uint32_t g(std::uint32_t x) const;

  std::array<std::uint32_t, 40> subkeys_{};
  // Key-dependent S-boxes fused with the MDS multiply, one table per byte lane.
  std::array<std::array<std::uint32_t, 256>, 4> sbox_{};
};

}  // namespace pufota::crypto
