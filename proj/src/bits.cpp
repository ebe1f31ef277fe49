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

#include "pufota/bits.hpp"

#include <bit>

#include "pufota/error.hpp"

namespace pufota {

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

BitString BitString::from_bytes(ByteView bytes, std::size_t bits) {
  if (bytes.size() * 8 < bits) {
    throw ContractError("not enough bytes for requested bit length");
  }
  BitString out(bits);
  std::copy_n(bytes.begin(), out.bytes_.size(), out.bytes_.begin());
  out.clear_tail();
  return out;
}

BitString BitString::from_hex(std::string_view hex, std::size_t bits) {
  return from_bytes(pufota::from_hex(hex), bits);
}

std::size_t BitString::popcount() const {
  std::size_t n = 0;
  for (auto b : bytes_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

BitString BitString::operator^(const BitString& other) const {
  if (other.bits_ != bits_) throw ContractError("bit string length mismatch");
  BitString out(*this);
  for (std::size_t i = 0; i < bytes_.size(); ++i) out.bytes_[i] ^= other.bytes_[i];
  return out;
}

BitString BitString::operator~() const {
  BitString out(*this);
  for (auto& b : out.bytes_) b = static_cast<std::uint8_t>(~b);
  out.clear_tail();
  return out;
}

void BitString::clear_tail() {
  if (bits_ % 8 != 0) {
    bytes_.back() &= static_cast<std::uint8_t>(0xffu << (8 - bits_ % 8));
  }
}

std::size_t hamming(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw ContractError("bit string length mismatch");
  std::size_t n = 0;
  auto x = a.bytes();
  auto y = b.bytes();
  for (std::size_t i = 0; i < x.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(x[i] ^ y[i])));
  }
  return n;
}

}  // namespace pufota
