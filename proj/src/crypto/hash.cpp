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

#include "pufota/crypto/hash.hpp"

#include <openssl/evp.h>

#include "pufota/error.hpp"

namespace pufota::crypto {
namespace {

const EVP_MD* md_for(HashAlgorithm algorithm) {
  // Fetched once; EVP_MD objects from EVP_sha256() etc. are static.
  switch (algorithm) {
    case HashAlgorithm::sha256:
      return EVP_sha256();
    case HashAlgorithm::sha3_512:
      return EVP_sha3_512();
  }
  throw ContractError("unknown hash algorithm");
}

struct CtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using CtxPtr = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

EVP_MD_CTX* thread_ctx() {
  thread_local CtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx) throw Error("EVP_MD_CTX_new failed");
  return ctx.get();
}

}  // namespace

std::size_t digest_size(HashAlgorithm algorithm) {
  return algorithm == HashAlgorithm::sha256 ? 32 : 64;
}

void digest_into(HashAlgorithm algorithm, ByteView data, std::span<std::uint8_t> out) {
  if (out.size() != digest_size(algorithm)) throw ContractError("digest buffer size");
  EVP_MD_CTX* ctx = thread_ctx();
  unsigned int len = 0;
  if (EVP_DigestInit_ex(ctx, md_for(algorithm), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, out.data(), &len) != 1) {
    throw Error("digest computation failed");
  }
}

Bytes digest(HashAlgorithm algorithm, ByteView data) {
  Bytes out(digest_size(algorithm));
  digest_into(algorithm, data, out);
  return out;
}

struct StreamingHash::Impl {
  CtxPtr ctx{EVP_MD_CTX_new()};
};

StreamingHash::StreamingHash(HashAlgorithm algorithm)
    : impl_(std::make_unique<Impl>()), algorithm_(algorithm) {
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx.get(), md_for(algorithm), nullptr) != 1) {
    throw Error("digest init failed");
  }
}

StreamingHash::~StreamingHash() = default;

StreamingHash& StreamingHash::update(ByteView data) {
  if (EVP_DigestUpdate(impl_->ctx.get(), data.data(), data.size()) != 1) {
    throw Error("digest update failed");
  }
  return *this;
}

Bytes StreamingHash::finish() {
  Bytes out(digest_size(algorithm_));
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(impl_->ctx.get(), out.data(), &len) != 1) {
    throw Error("digest final failed");
  }
  return out;
}

}  // namespace pufota::crypto
