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
#include <string_view>

#include "pufota/bits.hpp"
#include "pufota/crypto/hash.hpp"

namespace pufota::crypto {

enum class ProfileId : std::uint8_t { lightweight = 0, midweight = 1, heavyweight = 2 };

enum class CipherAlgorithm { simon64_128, twofish128, aes128_gcm };

using Key128 = std::array<std::uint8_t, 16>;
using Nonce = std::array<std::uint8_t, 12>;

// One of the three hash + cipher pairings a device can be provisioned with.
struct CryptoProfile {
  ProfileId id;
  std::string_view name;  // "light" | "mid" | "heavy"
  HashAlgorithm hash;
  CipherAlgorithm cipher;
  std::size_t digest_bits;
  std::size_t key_bits;
  std::size_t tag_bytes;  // 0 for the counter-mode ciphers

  std::size_t digest_bytes() const { return digest_bits / 8; }
};

const CryptoProfile& profile(ProfileId id);

// Accepts "light" / "mid" / "heavy" and the long names.
const CryptoProfile& profile_by_name(std::string_view name);

inline constexpr std::array<ProfileId, 3> kAllProfiles = {
    ProfileId::lightweight, ProfileId::midweight, ProfileId::heavyweight};

Bytes hash(const CryptoProfile& p, ByteView data);

// Counter mode for SIMON and Twofish; AES-GCM appends a 16-byte tag. The
// nonce must never repeat under one key.
Bytes encrypt(const CryptoProfile& p, const Key128& key, ByteView plaintext, const Nonce& nonce);

// Throws AuthError when an AES-GCM tag does not verify. The counter-mode
// ciphers cannot detect a wrong key; callers check an inner digest.
Bytes decrypt(const CryptoProfile& p, const Key128& key, ByteView ciphertext, const Nonce& nonce);

// A set element is a small integer; it becomes a cipher key by hashing its
// 8-byte little-endian encoding and keeping the first 16 bytes.
Key128 kdf_from_element(const CryptoProfile& p, std::uint64_t element);

// SK = key XOR (timestamp as 8 little-endian bytes, then 8 zero bytes).
Key128 derive_session_key(const Key128& i1_key, std::uint64_t timestamp);

}  // namespace pufota::crypto
