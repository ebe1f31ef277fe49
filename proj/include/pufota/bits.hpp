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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pufota {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Fixed-length bit string packed most-significant-bit first: bit 0 is the
// top bit of byte 0. Bits past size() in the last byte are always zero.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t bits) : bits_(bits), bytes_((bits + 7) / 8) {}

  // Takes the leading `bits` bits of `bytes`.
  static BitString from_bytes(ByteView bytes, std::size_t bits);
  static BitString from_hex(std::string_view hex, std::size_t bits);

  std::size_t size() const { return bits_; }
  bool empty() const { return bits_ == 0; }

  bool get(std::size_t i) const {
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
  }
  void set(std::size_t i, bool v) {
    const auto mask = static_cast<std::uint8_t>(0x80u >> (i & 7));
    if (v) {
      bytes_[i >> 3] |= mask;
    } else {
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }
  }
  void flip(std::size_t i) {
    bytes_[i >> 3] ^= static_cast<std::uint8_t>(0x80u >> (i & 7));
  }

  ByteView bytes() const { return bytes_; }
  std::span<std::uint8_t> mutable_bytes() { return bytes_; }

  std::size_t popcount() const;
  std::string to_hex() const { return pufota::to_hex(bytes_); }

  BitString operator^(const BitString& other) const;
  BitString operator~() const;
  bool operator==(const BitString& other) const = default;

 private:
  void clear_tail();

  std::size_t bits_ = 0;
  Bytes bytes_;
};

std::size_t hamming(const BitString& a, const BitString& b);

// Little-endian integer codecs used by every wire and file format.
inline void put_le(Bytes& out, std::uint64_t v, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}
inline std::uint64_t get_le(ByteView in, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  }
  return v;
}

}  // namespace pufota
