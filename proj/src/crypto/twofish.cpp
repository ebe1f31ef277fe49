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

#include "pufota/crypto/twofish.hpp"

#include <bit>

namespace pufota::crypto {
namespace {

// The q0/q1 byte permutations, built from their 4-bit component tables.
using Nibbles = std::array<std::uint8_t, 16>;

constexpr std::array<Nibbles, 4> kQ0Tables = {{
    {0x8, 0x1, 0x7, 0xD, 0x6, 0xF, 0x3, 0x2, 0x0, 0xB, 0x5, 0x9, 0xE, 0xC, 0xA, 0x4},
    {0xE, 0xC, 0xB, 0x8, 0x1, 0x2, 0x3, 0x5, 0xF, 0x4, 0xA, 0x6, 0x7, 0x0, 0x9, 0xD},
    {0xB, 0xA, 0x5, 0xE, 0x6, 0xD, 0x9, 0x0, 0xC, 0x8, 0xF, 0x3, 0x2, 0x4, 0x7, 0x1},
    {0xD, 0x7, 0xF, 0x4, 0x1, 0x2, 0x6, 0xE, 0x9, 0xB, 0x3, 0x0, 0x8, 0x5, 0xC, 0xA},
}};

constexpr std::array<Nibbles, 4> kQ1Tables = {{
    {0x2, 0x8, 0xB, 0xD, 0xF, 0x7, 0x6, 0xE, 0x3, 0x1, 0x9, 0x4, 0x0, 0xA, 0xC, 0x5},
    {0x1, 0xE, 0x2, 0xB, 0x4, 0xC, 0x3, 0x7, 0x6, 0xD, 0xA, 0x5, 0xF, 0x9, 0x0, 0x8},
    {0x4, 0xC, 0x7, 0x5, 0x1, 0x6, 0x9, 0xA, 0x0, 0xE, 0xD, 0x8, 0x2, 0xB, 0x3, 0xF},
    {0xB, 0x9, 0x5, 0x1, 0xC, 0x3, 0xD, 0xE, 0x6, 0x4, 0x7, 0xF, 0x2, 0x0, 0x8, 0xA},
}};

constexpr std::uint8_t ror4(std::uint8_t x) {
  return static_cast<std::uint8_t>(((x >> 1) | (x << 3)) & 0xF);
}

constexpr std::array<std::uint8_t, 256> build_q(const std::array<Nibbles, 4>& t) {
  std::array<std::uint8_t, 256> q{};
  for (int x = 0; x < 256; ++x) {
    std::uint8_t a0 = static_cast<std::uint8_t>(x >> 4);
    std::uint8_t b0 = static_cast<std::uint8_t>(x & 15);
    std::uint8_t a1 = a0 ^ b0;
    std::uint8_t b1 = static_cast<std::uint8_t>((a0 ^ ror4(b0) ^ (8 * a0)) & 15);
    std::uint8_t a2 = t[0][a1];
    std::uint8_t b2 = t[1][b1];
    std::uint8_t a3 = a2 ^ b2;
    std::uint8_t b3 = static_cast<std::uint8_t>((a2 ^ ror4(b2) ^ (8 * a2)) & 15);
    std::uint8_t a4 = t[2][a3];
    std::uint8_t b4 = t[3][b3];
    q[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>((b4 << 4) | a4);
  }
  return q;
}

constexpr auto kQ0 = build_q(kQ0Tables);
constexpr auto kQ1 = build_q(kQ1Tables);

// Multiplication in GF(2^8) modulo the given primitive polynomial.
constexpr std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b, unsigned poly) {
  unsigned r = 0;
  unsigned x = a;
  while (b) {
    if (b & 1) r ^= x;
    x <<= 1;
    if (x & 0x100) x ^= poly;
    b >>= 1;
  }
  return static_cast<std::uint8_t>(r);
}

constexpr unsigned kMdsPoly = 0x169;
constexpr unsigned kRsPoly = 0x14D;

constexpr std::uint8_t kMds[4][4] = {
    {0x01, 0xEF, 0x5B, 0x5B},
    {0x5B, 0xEF, 0xEF, 0x01},
    {0xEF, 0x5B, 0x01, 0xEF},
    {0xEF, 0x01, 0xEF, 0x5B},
};

constexpr std::uint8_t kRs[4][8] = {
    {0x01, 0xA4, 0x55, 0x87, 0x5A, 0x58, 0xDB, 0x9E},
    {0xA4, 0x56, 0x82, 0xF3, 0x1E, 0xC6, 0x68, 0xE5},
    {0x02, 0xA1, 0xFC, 0xC1, 0x47, 0xAE, 0x3D, 0x19},
    {0xA4, 0x55, 0x87, 0x5A, 0x58, 0xDB, 0x9E, 0x03},
};

// Column `lane` of the MDS matrix scaled by y.
std::uint32_t mds_column(int lane, std::uint8_t y) {
  std::uint32_t z = 0;
  for (int row = 0; row < 4; ++row) {
    z |= std::uint32_t{gf_mul(kMds[row][lane], y, kMdsPoly)} << (8 * row);
  }
  return z;
}

std::uint8_t byte_of(std::uint32_t w, int i) { return static_cast<std::uint8_t>(w >> (8 * i)); }

// h() for k = 2; l0 and l1 are the two key words of the list L.
std::uint32_t h(std::uint32_t x, std::uint32_t l0, std::uint32_t l1) {
  const std::uint8_t y0 = kQ1[kQ0[kQ0[byte_of(x, 0)] ^ byte_of(l1, 0)] ^ byte_of(l0, 0)];
  const std::uint8_t y1 = kQ0[kQ0[kQ1[byte_of(x, 1)] ^ byte_of(l1, 1)] ^ byte_of(l0, 1)];
  const std::uint8_t y2 = kQ1[kQ1[kQ0[byte_of(x, 2)] ^ byte_of(l1, 2)] ^ byte_of(l0, 2)];
  const std::uint8_t y3 = kQ0[kQ1[kQ1[byte_of(x, 3)] ^ byte_of(l1, 3)] ^ byte_of(l0, 3)];
  return mds_column(0, y0) ^ mds_column(1, y1) ^ mds_column(2, y2) ^ mds_column(3, y3);
}

std::uint32_t load_le32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

void store_le32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

Twofish128::Twofish128(std::span<const std::uint8_t, kKeyBytes> key) {
  const std::uint32_t m0 = load_le32(key.data());
  const std::uint32_t m1 = load_le32(key.data() + 4);
  const std::uint32_t m2 = load_le32(key.data() + 8);
  const std::uint32_t m3 = load_le32(key.data() + 12);

  // S_i = RS * key bytes 8i..8i+7; g() uses the list (S1, S0).
  std::uint32_t s[2] = {0, 0};
  for (int i = 0; i < 2; ++i) {
    for (int row = 0; row < 4; ++row) {
      std::uint8_t acc = 0;
      for (int col = 0; col < 8; ++col) {
        acc ^= gf_mul(kRs[row][col], key[static_cast<std::size_t>(8 * i + col)], kRsPoly);
      }
      s[i] |= std::uint32_t{acc} << (8 * row);
    }
  }

  constexpr std::uint32_t rho = 0x01010101u;
  for (std::uint32_t i = 0; i < 20; ++i) {
    const std::uint32_t a = h(2 * i * rho, m0, m2);
    const std::uint32_t b = std::rotl(h((2 * i + 1) * rho, m1, m3), 8);
    subkeys_[2 * i] = a + b;
    subkeys_[2 * i + 1] = std::rotl(a + 2 * b, 9);
  }

  for (int x = 0; x < 256; ++x) {
    const auto b = static_cast<std::uint8_t>(x);
    const std::uint32_t l0 = s[1];
    const std::uint32_t l1 = s[0];
    sbox_[0][b] = mds_column(0, kQ1[kQ0[kQ0[b] ^ byte_of(l1, 0)] ^ byte_of(l0, 0)]);
    sbox_[1][b] = mds_column(1, kQ0[kQ0[kQ1[b] ^ byte_of(l1, 1)] ^ byte_of(l0, 1)]);
    sbox_[2][b] = mds_column(2, kQ1[kQ1[kQ0[b] ^ byte_of(l1, 2)] ^ byte_of(l0, 2)]);
    sbox_[3][b] = mds_column(3, kQ0[kQ1[kQ1[b] ^ byte_of(l1, 3)] ^ byte_of(l0, 3)]);
  }
}

std::uint32_t Twofish128::g(std::uint32_t x) const {
  return sbox_[0][byte_of(x, 0)] ^ sbox_[1][byte_of(x, 1)] ^ sbox_[2][byte_of(x, 2)] ^
         sbox_[3][byte_of(x, 3)];
}

void Twofish128::encrypt_block(std::span<std::uint8_t, kBlockBytes> block) const {
  std::uint32_t r[4];
  for (int i = 0; i < 4; ++i) r[i] = load_le32(block.data() + 4 * i) ^ subkeys_[static_cast<std::size_t>(i)];
  for (std::size_t round = 0; round < 16; ++round) {
    const std::uint32_t t0 = g(r[0]);
    const std::uint32_t t1 = g(std::rotl(r[1], 8));
    const std::uint32_t f0 = t0 + t1 + subkeys_[2 * round + 8];
    const std::uint32_t f1 = t0 + 2 * t1 + subkeys_[2 * round + 9];
    const std::uint32_t n2 = std::rotr(r[2] ^ f0, 1);
    const std::uint32_t n3 = std::rotl(r[3], 1) ^ f1;
    r[2] = r[0];
    r[3] = r[1];
    r[0] = n2;
    r[1] = n3;
  }
  // Undo the final swap, then output whitening.
  for (int i = 0; i < 4; ++i) {
    store_le32(block.data() + 4 * i, r[(i + 2) % 4] ^ subkeys_[static_cast<std::size_t>(i + 4)]);
  }
}

void Twofish128::decrypt_block(std::span<std::uint8_t, kBlockBytes> block) const {
  std::uint32_t r[4];
  for (int i = 0; i < 4; ++i) {
    r[(i + 2) % 4] = load_le32(block.data() + 4 * i) ^ subkeys_[static_cast<std::size_t>(i + 4)];
  }
  for (std::size_t round = 16; round-- > 0;) {
    // Inverse of one encryption round: (r0,r1) hold the new values, (r2,r3)
    // the old r0,r1.
    const std::uint32_t t0 = g(r[2]);
    const std::uint32_t t1 = g(std::rotl(r[3], 8));
    const std::uint32_t f0 = t0 + t1 + subkeys_[2 * round + 8];
    const std::uint32_t f1 = t0 + 2 * t1 + subkeys_[2 * round + 9];
    const std::uint32_t old2 = std::rotl(r[0], 1) ^ f0;
    const std::uint32_t old3 = std::rotr(r[1] ^ f1, 1);
    r[0] = r[2];
    r[1] = r[3];
    r[2] = old2;
    r[3] = old3;
  }
  for (int i = 0; i < 4; ++i) {
    store_le32(block.data() + 4 * i, r[i] ^ subkeys_[static_cast<std::size_t>(i)]);
  }
}

}  // namespace pufota::crypto
