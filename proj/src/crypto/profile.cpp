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

#include "pufota/crypto/profile.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>

#include "pufota/crypto/simon.hpp"
#include "pufota/crypto/twofish.hpp"
#include "pufota/error.hpp"

namespace pufota::crypto {
namespace {

constexpr std::array<CryptoProfile, 3> kProfiles = {{
    {ProfileId::lightweight, "light", HashAlgorithm::sha256, CipherAlgorithm::simon64_128, 256, 128, 0},
    {ProfileId::midweight, "mid", HashAlgorithm::sha256, CipherAlgorithm::twofish128, 256, 128, 0},
    {ProfileId::heavyweight, "heavy", HashAlgorithm::sha3_512, CipherAlgorithm::aes128_gcm, 512, 128, 16},
}};

// SIMON has a 64-bit block, too small for nonce || counter. The first eight
// nonce bytes (big-endian) seed a 64-bit counter instead; the last four nonce
// bytes are not used. Keys in this protocol are per-session, so the counter
// space is never shared between messages in practice.
void simon_ctr(const Key128& key, const Nonce& nonce, std::span<std::uint8_t> data) {
  const Simon64_128 cipher(key);
  std::uint64_t counter = 0;
  for (int i = 0; i < 8; ++i) counter = (counter << 8) | nonce[static_cast<std::size_t>(i)];
  std::array<std::uint8_t, 8> ks{};
  for (std::size_t off = 0; off < data.size(); off += 8, ++counter) {
    for (int i = 0; i < 8; ++i) ks[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
    cipher.encrypt_block(ks);
    const std::size_t n = std::min<std::size_t>(8, data.size() - off);
    for (std::size_t i = 0; i < n; ++i) data[off + i] ^= ks[i];
  }
}

// Twofish counter block: 12-byte nonce || 32-bit big-endian block counter.
void twofish_ctr(const Key128& key, const Nonce& nonce, std::span<std::uint8_t> data) {
  if (data.size() / 16 >= (std::size_t{1} << 32)) throw ContractError("message too long for CTR");
  const Twofish128 cipher(key);
  std::array<std::uint8_t, 16> ks{};
  std::uint32_t counter = 0;
  for (std::size_t off = 0; off < data.size(); off += 16, ++counter) {
    std::copy(nonce.begin(), nonce.end(), ks.begin());
    for (int i = 0; i < 4; ++i) ks[static_cast<std::size_t>(12 + i)] = static_cast<std::uint8_t>(counter >> (24 - 8 * i));
    cipher.encrypt_block(ks);
    const std::size_t n = std::min<std::size_t>(16, data.size() - off);
    for (std::size_t i = 0; i < n; ++i) data[off + i] ^= ks[i];
  }
}

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

constexpr std::size_t kGcmTag = 16;

Bytes gcm_encrypt(const Key128& key, ByteView plaintext, const Nonce& nonce) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes out(plaintext.size() + kGcmTag);
  int len = 0;
  int total = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), nonce.data()) != 1) {
    throw Error("AES-GCM init failed");
  }
  if (!plaintext.empty()) {
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1) {
      throw Error("AES-GCM encrypt failed");
    }
    total = len;
  }
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kGcmTag),
                          out.data() + plaintext.size()) != 1) {
    throw Error("AES-GCM finalize failed");
  }
  return out;
}

Bytes gcm_decrypt(const Key128& key, ByteView ciphertext, const Nonce& nonce) {
  if (ciphertext.size() < kGcmTag) throw AuthError("AES-GCM ciphertext shorter than tag");
  const std::size_t body = ciphertext.size() - kGcmTag;
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes out(body);
  int len = 0;
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), nonce.data()) != 1) {
    throw Error("AES-GCM init failed");
  }
  if (body > 0 && EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext.data(),
                                    static_cast<int>(body)) != 1) {
    throw Error("AES-GCM decrypt failed");
  }
  Bytes tag(ciphertext.begin() + static_cast<std::ptrdiff_t>(body), ciphertext.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(kGcmTag), tag.data()) != 1) {
    throw Error("AES-GCM set tag failed");
  }
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + body, &len) != 1) {
    throw AuthError("AES-GCM tag mismatch");
  }
  return out;
}

}  // namespace

const CryptoProfile& profile(ProfileId id) {
  const auto index = static_cast<std::size_t>(id);
  if (index >= kProfiles.size()) throw ConfigError("unknown profile id");
  return kProfiles[index];
}

const CryptoProfile& profile_by_name(std::string_view name) {
  if (name == "light" || name == "lightweight") return kProfiles[0];
  if (name == "mid" || name == "midweight") return kProfiles[1];
  if (name == "heavy" || name == "heavyweight") return kProfiles[2];
  throw ConfigError("unknown profile: " + std::string(name));
}

Bytes hash(const CryptoProfile& p, ByteView data) { return digest(p.hash, data); }

Bytes encrypt(const CryptoProfile& p, const Key128& key, ByteView plaintext, const Nonce& nonce) {
  switch (p.cipher) {
    case CipherAlgorithm::simon64_128: {
      Bytes out(plaintext.begin(), plaintext.end());
      simon_ctr(key, nonce, out);
      return out;
    }
    case CipherAlgorithm::twofish128: {
      Bytes out(plaintext.begin(), plaintext.end());
      twofish_ctr(key, nonce, out);
      return out;
    }
    case CipherAlgorithm::aes128_gcm:
      return gcm_encrypt(key, plaintext, nonce);
  }
  throw ContractError("unknown cipher");
}

Bytes decrypt(const CryptoProfile& p, const Key128& key, ByteView ciphertext, const Nonce& nonce) {
  if (p.cipher == CipherAlgorithm::aes128_gcm) return gcm_decrypt(key, ciphertext, nonce);
  // Counter mode is its own inverse.
  return encrypt(p, key, ciphertext, nonce);
}

Key128 kdf_from_element(const CryptoProfile& p, std::uint64_t element) {
  Bytes encoded;
  put_le(encoded, element, 8);
  const Bytes d = hash(p, encoded);
  Key128 key{};
  std::copy_n(d.begin(), key.size(), key.begin());
  return key;
}

Key128 derive_session_key(const Key128& i1_key, std::uint64_t timestamp) {
  Key128 sk = i1_key;
  for (std::size_t i = 0; i < 8; ++i) sk[i] ^= static_cast<std::uint8_t>(timestamp >> (8 * i));
  return sk;
}

}  // namespace pufota::crypto
