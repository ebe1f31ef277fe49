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

// SIMON 64/128: 32-bit words, 4-word key, 44 rounds.
//
// Byte convention follows the printed test vectors of the cipher's designers:
// key bytes are the words k3 k2 k1 k0 in big-endian order, and a block is
// the words x y in big-endian order.
class Simon64_128 {
 public:
  static constexpr std::size_t kBlockBytes = 8;
  static constexpr std::size_t kKeyBytes = 16;
  static constexpr std::size_t kRounds = 44;

  explicit Simon64_128(std::span<const std::uint8_t, kKeyBytes> key);

  void encrypt_block(std::span<std::uint8_t, kBlockBytes> block) const;
  void decrypt_block(std::span<std::uint8_t, kBlockBytes> block) const;

 private:
  std::array<std::uint32_t, kRounds> round_keys_{};
};

}  // namespace pufota::crypto
