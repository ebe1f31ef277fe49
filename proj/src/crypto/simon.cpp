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

#include "pufota/crypto/simon.hpp"

#include <bit>

namespace pufota::crypto {
namespace {

// Constant sequence z3, least significant bit first.
constexpr std::uint64_t kZ3 = 0xfc2ce51207a635dbull;

std::uint32_t load_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

void store_be32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 24);
  p[1] = static_cast<std::uint8_t>(v >> 16);
  p[2] = static_cast<std::uint8_t>(v >> 8);
  p[3] = static_cast<std::uint8_t>(v);
}

inline std::uint32_t f(std::uint32_t x) {
  return (std::rotl(x, 1) & std::rotl(x, 8)) ^ std::rotl(x, 2);
}

}  // namespace

Simon64_128::Simon64_128(std::span<const std::uint8_t, kKeyBytes> key) {
  for (int i = 0; i < 4; ++i) {
    round_keys_[static_cast<std::size_t>(i)] = load_be32(key.data() + 12 - 4 * i);
  }
  constexpr std::uint32_t c = 0xfffffffcu;
  for (std::size_t i = 4; i < kRounds; ++i) {
    std::uint32_t tmp = std::rotr(round_keys_[i - 1], 3) ^ round_keys_[i - 3];
    tmp ^= std::rotr(tmp, 1);
    round_keys_[i] = c ^ static_cast<std::uint32_t>((kZ3 >> ((i - 4) % 62)) & 1u) ^
                     round_keys_[i - 4] ^ tmp;
  }
}

void Simon64_128::encrypt_block(std::span<std::uint8_t, kBlockBytes> block) const {
  std::uint32_t x = load_be32(block.data());
  std::uint32_t y = load_be32(block.data() + 4);
  for (auto k : round_keys_) {
    const std::uint32_t t = x;
    x = y ^ f(x) ^ k;
    y = t;
  }
  store_be32(block.data(), x);
  store_be32(block.data() + 4, y);
}

void Simon64_128::decrypt_block(std::span<std::uint8_t, kBlockBytes> block) const {
  std::uint32_t x = load_be32(block.data());
  std::uint32_t y = load_be32(block.data() + 4);
  for (auto it = round_keys_.rbegin(); it != round_keys_.rend(); ++it) {
    const std::uint32_t t = y;
    y = x ^ f(y) ^ *it;
    x = t;
  }
  store_be32(block.data(), x);
  store_be32(block.data() + 4, y);
}

}  // namespace pufota::crypto
