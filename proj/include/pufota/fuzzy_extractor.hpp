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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pufota/bits.hpp"
#include "pufota/crypto/hash.hpp"
#include "pufota/fuzzy/bch.hpp"

namespace pufota::fuzzy {

struct CodeParams {
  std::size_t n = 0;
  std::size_t k = 0;
  unsigned t = 0;
  bool operator==(const CodeParams&) const = default;
};

// Public side of a code-offset enrollment. The response is cut into
// `segments.size()` consecutive blocks; block b covers segments[b] response
// bits followed by zero padding up to n. code_offset holds one n-bit word per
// block, concatenated.
struct HelperData {
  CodeParams code;
  std::uint32_t primitive_poly = 0;
  crypto::HashAlgorithm hash = crypto::HashAlgorithm::sha256;
  std::size_t key_bytes = 16;
  std::vector<std::size_t> segments;
  BitString code_offset;

  bool operator==(const HelperData&) const = default;
};

// Single-line text form used inside the model store.
std::string serialize_helper(const HelperData& helper);
HelperData parse_helper(std::string_view text);

struct Enrollment {
  Bytes key;
  HelperData helper;
};

class FuzzyExtractor {
 public:
  // Splits a `response_bits`-wide response over the fewest blocks of `code`
  // that fit, as evenly as possible (256 bits over BCH(127, 64, 10) gives
  // 86 / 85 / 85).
  FuzzyExtractor(BchCode code, std::size_t response_bits, std::size_t key_bytes = 16);

  const BchCode& code() const { return code_; }
  std::size_t response_bits() const { return response_bits_; }
  const std::vector<std::size_t>& segments() const { return segments_; }

  // Draws one random codeword per block from `seed`. Key = leading key_bytes
  // of hash(concatenated codewords).
  Enrollment generate(const BitString& response, crypto::HashAlgorithm hash,
                      std::uint64_t seed) const;

  // Throws ExtractionError when any block is beyond correction.
  Bytes reproduce(const BitString& noisy, const HelperData& helper) const;

  // True iff every block of a and b differs in at most t bits.
  bool within_capacity(const BitString& a, const BitString& b) const;

 private:
  BchCode code_;
  std::size_t response_bits_;
  std::size_t key_bytes_;
  std::vector<std::size_t> segments_;
};

// Flips exactly `flips` distinct, seed-chosen positions. Throws ContractError
// when flips > width.
BitString apply_noise(const BitString& response, std::size_t flips, std::uint64_t seed);

}  // namespace pufota::fuzzy
