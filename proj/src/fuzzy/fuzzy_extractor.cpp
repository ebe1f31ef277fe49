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

#include "pufota/fuzzy_extractor.hpp"

#include <numeric>
#include <sstream>

#include "pufota/error.hpp"
#include "pufota/rng.hpp"

namespace pufota::fuzzy {
namespace {

std::string_view hash_name(crypto::HashAlgorithm h) {
  return h == crypto::HashAlgorithm::sha256 ? "sha256" : "sha3-512";
}

crypto::HashAlgorithm hash_from_name(std::string_view s) {
  if (s == "sha256") return crypto::HashAlgorithm::sha256;
  if (s == "sha3-512") return crypto::HashAlgorithm::sha3_512;
  throw DecodeError("unknown hash in helper data");
}

Bytes derive_key(const std::vector<BchCode::Word>& codewords, crypto::HashAlgorithm hash,
                 std::size_t key_bytes) {
  std::size_t total = 0;
  for (const auto& c : codewords) total += c.size();
  BitString packed(total);
  std::size_t pos = 0;
  for (const auto& c : codewords) {
    for (auto b : c) packed.set(pos++, b != 0);
  }
  Bytes d = crypto::digest(hash, packed.bytes());
  d.resize(key_bytes);
  return d;
}

}  // namespace

FuzzyExtractor::FuzzyExtractor(BchCode code, std::size_t response_bits, std::size_t key_bytes)
    : code_(std::move(code)), response_bits_(response_bits), key_bytes_(key_bytes) {
  if (response_bits == 0) throw ConfigError("fuzzy extractor needs a non-empty response");
  if (key_bytes == 0 || key_bytes > 32) throw ConfigError("fuzzy extractor key size out of range");
  const std::size_t blocks = (response_bits + code_.n() - 1) / code_.n();
  segments_.assign(blocks, response_bits / blocks);
  for (std::size_t b = 0; b < response_bits % blocks; ++b) ++segments_[b];
}

Enrollment FuzzyExtractor::generate(const BitString& response, crypto::HashAlgorithm hash,
                                    std::uint64_t seed) const {
  if (response.size() != response_bits_) {
    throw ConfigError("response width does not match the fuzzy extractor");
  }
  Rng rng(seed);
  const std::size_t n = code_.n();
  Enrollment e;
  e.helper.code = {n, code_.k(), code_.t()};
  e.helper.primitive_poly = code_.primitive_poly();
  e.helper.hash = hash;
  e.helper.key_bytes = key_bytes_;
  e.helper.segments = segments_;
  e.helper.code_offset = BitString(n * segments_.size());

  std::vector<BchCode::Word> codewords;
  std::size_t in = 0;
  for (std::size_t b = 0; b < segments_.size(); ++b) {
    BchCode::Word msg(code_.k());
    for (auto& bit : msg) bit = static_cast<std::uint8_t>(rng() & 1);
    const auto cw = code_.encode(msg);
    for (std::size_t i = 0; i < n; ++i) {
      const bool r = i < segments_[b] && response.get(in + i);
      e.helper.code_offset.set(b * n + i, r != (cw[i] != 0));
    }
    in += segments_[b];
    codewords.push_back(cw);
  }
  e.key = derive_key(codewords, hash, key_bytes_);
  return e;
}

Bytes FuzzyExtractor::reproduce(const BitString& noisy, const HelperData& helper) const {
  if (noisy.size() != response_bits_) throw ContractError("noisy response width mismatch");
  const std::size_t n = code_.n();
  if (helper.code != CodeParams{n, code_.k(), code_.t()} ||
      helper.primitive_poly != code_.primitive_poly() || helper.segments != segments_ ||
      helper.code_offset.size() != n * segments_.size()) {
    throw ExtractionError("helper data does not match the extractor");
  }
  std::vector<BchCode::Word> codewords;
  std::size_t in = 0;
  for (std::size_t b = 0; b < segments_.size(); ++b) {
    BchCode::Word w(n);
    for (std::size_t i = 0; i < n; ++i) {
      const bool r = i < segments_[b] && noisy.get(in + i);
      w[i] = static_cast<std::uint8_t>(r != helper.code_offset.get(b * n + i));
    }
    in += segments_[b];
    auto decoded = code_.decode(w);
    if (!decoded) throw ExtractionError("response block beyond correction capacity");
    codewords.push_back(std::move(*decoded));
  }
  return derive_key(codewords, helper.hash, helper.key_bytes);
}

bool FuzzyExtractor::within_capacity(const BitString& a, const BitString& b) const {
  if (a.size() != response_bits_ || b.size() != response_bits_) {
    throw ContractError("response width mismatch");
  }
  std::size_t in = 0;
  for (std::size_t seg : segments_) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < seg; ++i) d += a.get(in + i) != b.get(in + i);
    if (d > code_.t()) return false;
    in += seg;
  }
  return true;
}

BitString apply_noise(const BitString& response, std::size_t flips, std::uint64_t seed) {
  const std::size_t w = response.size();
  if (flips > w) throw ContractError("cannot flip more bits than the response has");
  // Partial Fisher-Yates: the first `flips` entries are distinct positions.
  std::vector<std::size_t> pos(w);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  Rng rng(seed);
  BitString out = response;
  for (std::size_t i = 0; i < flips; ++i) {
    const std::size_t j = i + uniform_below(rng, w - i);
    std::swap(pos[i], pos[j]);
    out.flip(pos[i]);
  }
  return out;
}

std::string serialize_helper(const HelperData& h) {
  std::ostringstream os;
  os << "bch " << h.code.n << ' ' << h.code.k << ' ' << h.code.t << ' ' << h.primitive_poly
     << ' ' << hash_name(h.hash) << ' ' << h.key_bytes << " segments";
  for (auto s : h.segments) os << ' ' << s;
  os << " offset " << h.code_offset.size() << ' ' << h.code_offset.to_hex();
  return os.str();
}

HelperData parse_helper(std::string_view text) {
  std::istringstream is{std::string(text)};
  HelperData h;
  std::string tag;
  std::string hash;
  if (!(is >> tag) || tag != "bch") throw DecodeError("helper data: expected 'bch'");
  if (!(is >> h.code.n >> h.code.k >> h.code.t >> h.primitive_poly >> hash >> h.key_bytes)) {
    throw DecodeError("helper data: malformed code parameters");
  }
  h.hash = hash_from_name(hash);
  if (!(is >> tag) || tag != "segments") throw DecodeError("helper data: expected segments");
  while (is >> tag && tag != "offset") {
    try {
      h.segments.push_back(std::stoull(tag));
    } catch (const std::logic_error&) {
      throw DecodeError("helper data: bad segment size");
    }
  }
  if (tag != "offset") throw DecodeError("helper data: expected offset");
  std::size_t bits = 0;
  std::string hex;
  if (!(is >> bits >> hex)) throw DecodeError("helper data: malformed offset");
  if (bits != h.code.n * h.segments.size() || hex.size() != (bits + 7) / 8 * 2) {
    throw DecodeError("helper data: offset length mismatch");
  }
  h.code_offset = BitString::from_hex(hex, bits);
  return h;
}

}  // namespace pufota::fuzzy
