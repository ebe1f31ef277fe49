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
#include <optional>
#include <vector>

namespace pufota::fuzzy {

// Narrow-sense primitive binary BCH code of length 2^m - 1 correcting t
// errors. Words are bit vectors indexed by polynomial degree (entry i is the
// coefficient of x^i), one bit per byte.
class BchCode {
 public:
  using Word = std::vector<std::uint8_t>;

  // `primitive_poly` includes the x^m term, e.g. 0x89 for x^7 + x^3 + 1.
  // Throws ConfigError if the polynomial is not primitive or t is too large.
  BchCode(unsigned m, unsigned t, std::uint32_t primitive_poly);

  // BCH(127, 64, 10) over x^7 + x^3 + 1.
  static BchCode default_code();
  // BCH(15, 5, 3) over x^4 + x + 1.
  static BchCode small_code();

  unsigned m() const { return m_; }
  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  unsigned t() const { return t_; }
  std::uint32_t primitive_poly() const { return poly_; }
  const Word& generator() const { return generator_; }

  // Systematic: message bits land in the top k coefficients.
  Word encode(const Word& message) const;
  Word message_of(const Word& codeword) const;

  // Nearest codeword within distance t, or nullopt when the error pattern is
  // detected as uncorrectable.
  std::optional<Word> decode(const Word& received) const;

  bool is_codeword(const Word& w) const;

  bool operator==(const BchCode& o) const {
    return m_ == o.m_ && t_ == o.t_ && poly_ == o.poly_;
  }

 private:
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t inv(std::uint32_t a) const;
  std::uint32_t alpha_pow(std::int64_t e) const;
  std::vector<std::uint32_t> syndromes(const Word& w) const;

  unsigned m_;
  unsigned t_;
  std::uint32_t poly_;
  std::size_t n_;
  std::size_t k_ = 0;
  std::vector<std::uint32_t> exp_;
  std::vector<std::int32_t> log_;
  Word generator_;
};

}  // namespace pufota::fuzzy
