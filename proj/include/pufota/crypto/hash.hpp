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
#include <memory>
#include <span>

#include "pufota/bits.hpp"

namespace pufota::crypto {

enum class HashAlgorithm { sha256, sha3_512 };

std::size_t digest_size(HashAlgorithm algorithm);

Bytes digest(HashAlgorithm algorithm, ByteView data);

// Allocation-free variant for hot loops; `out` must be digest_size() bytes.
void digest_into(HashAlgorithm algorithm, ByteView data, std::span<std::uint8_t> out);

// Incremental hashing over several non-contiguous fields.
class StreamingHash {
 public:
  explicit StreamingHash(HashAlgorithm algorithm);
  ~StreamingHash();
  StreamingHash(const StreamingHash&) = delete;
  StreamingHash& operator=(const StreamingHash&) = delete;

  StreamingHash& update(ByteView data);
  Bytes finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  HashAlgorithm algorithm_;
};

}  // namespace pufota::crypto
