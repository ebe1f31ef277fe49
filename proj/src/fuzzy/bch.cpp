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

#include "pufota/fuzzy/bch.hpp"

#include <algorithm>
#include <set>

#include "pufota/error.hpp"

namespace pufota::fuzzy {
namespace {

using Poly = std::vector<std::uint8_t>;

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] ^= b[j];
  }
  return r;
}

}  // namespace

BchCode::BchCode(unsigned m, unsigned t, std::uint32_t primitive_poly)
    : m_(m), t_(t), poly_(primitive_poly), n_((std::size_t{1} << m) - 1) {
  if (m < 3 || m > 16) throw ConfigError("BCH field degree must be in [3, 16]");
  if (t < 1) throw ConfigError("BCH t must be >= 1");
  if ((primitive_poly >> m) != 1) throw ConfigError("BCH polynomial degree does not match m");

  exp_.assign(2 * n_, 0);
  log_.assign(n_ + 1, -1);
  std::uint32_t x = 1;
  for (std::size_t i = 0; i < n_; ++i) {
    if (log_[x] != -1) throw ConfigError("BCH polynomial is not primitive");
    exp_[i] = x;
    log_[x] = static_cast<std::int32_t>(i);
    x <<= 1;
    if (x >> m) x ^= primitive_poly;
  }
  if (x != 1) throw ConfigError("BCH polynomial is not primitive");
  for (std::size_t i = n_; i < 2 * n_; ++i) exp_[i] = exp_[i - n_];

  // g(x) = product of the minimal polynomials of alpha^1 .. alpha^(2t).
  std::set<std::size_t> seen;
  Poly g{1};
  for (std::size_t i = 1; i <= 2 * t; ++i) {
    if (seen.contains(i % n_)) continue;
    std::vector<std::size_t> coset;
    for (std::size_t e = i % n_; !seen.contains(e); e = (e * 2) % n_) {
      seen.insert(e);
      coset.push_back(e);
    }
    // Minimal polynomial = prod (x - alpha^e) over the coset, in GF(2^m).
    std::vector<std::uint32_t> mp{1};
    for (std::size_t e : coset) {
      std::vector<std::uint32_t> next(mp.size() + 1, 0);
      for (std::size_t j = 0; j < mp.size(); ++j) {
        next[j + 1] ^= mp[j];
        next[j] ^= mul(mp[j], exp_[e]);
      }
      mp = std::move(next);
    }
    Poly bin(mp.size());
    for (std::size_t j = 0; j < mp.size(); ++j) {
      if (mp[j] > 1) throw ConfigError("BCH minimal polynomial not binary");
      bin[j] = static_cast<std::uint8_t>(mp[j]);
    }
    g = poly_mul(g, bin);
  }
  trim(g);
  if (g.size() - 1 >= n_) throw ConfigError("BCH t too large for the code length");
  generator_ = g;
  k_ = n_ - (g.size() - 1);
}

BchCode BchCode::default_code() { return BchCode(7, 10, 0x89); }
BchCode BchCode::small_code() { return BchCode(4, 3, 0x13); }

std::uint32_t BchCode::mul(std::uint32_t a, std::uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  return exp_[static_cast<std::size_t>(log_[a] + log_[b])];
}

std::uint32_t BchCode::inv(std::uint32_t a) const {
  return exp_[(n_ - static_cast<std::size_t>(log_[a])) % n_];
}

std::uint32_t BchCode::alpha_pow(std::int64_t e) const {
  const auto n = static_cast<std::int64_t>(n_);
  return exp_[static_cast<std::size_t>(((e % n) + n) % n)];
}

BchCode::Word BchCode::encode(const Word& message) const {
  if (message.size() != k_) throw ContractError("BCH message length mismatch");
  const std::size_t r = n_ - k_;
  Word cw(n_, 0);
  for (std::size_t i = 0; i < k_; ++i) cw[r + i] = message[i] & 1;
  // Remainder of x^r m(x) divided by g(x), by long division.
  Word rem = cw;
  for (std::size_t i = n_; i-- > r;) {
    if (!rem[i]) continue;
    for (std::size_t j = 0; j < generator_.size(); ++j) rem[i - r + j] ^= generator_[j];
  }
  for (std::size_t i = 0; i < r; ++i) cw[i] = rem[i];
  return cw;
}

BchCode::Word BchCode::message_of(const Word& codeword) const {
  if (codeword.size() != n_) throw ContractError("BCH word length mismatch");
  return Word(codeword.begin() + static_cast<std::ptrdiff_t>(n_ - k_), codeword.end());
}

std::vector<std::uint32_t> BchCode::syndromes(const Word& w) const {
  std::vector<std::uint32_t> s(2 * t_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (!w[i]) continue;
    for (std::size_t j = 1; j <= 2 * t_; ++j) s[j] ^= exp_[(i * j) % n_];
  }
  return s;
}

bool BchCode::is_codeword(const Word& w) const {
  if (w.size() != n_) return false;
  const auto s = syndromes(w);
  return std::all_of(s.begin(), s.end(), [](std::uint32_t v) { return v == 0; });
}

std::optional<BchCode::Word> BchCode::decode(const Word& received) const {
  if (received.size() != n_) throw ContractError("BCH word length mismatch");
  const auto s = syndromes(received);
  if (std::all_of(s.begin() + 1, s.end(), [](std::uint32_t v) { return v == 0; })) {
    return received;
  }

  // Berlekamp-Massey for the error locator sigma(x).
  std::vector<std::uint32_t> sigma{1};
  std::vector<std::uint32_t> prev{1};
  std::size_t len = 0;
  std::size_t shift = 1;
  std::uint32_t prev_disc = 1;
  for (std::size_t r = 1; r <= 2 * t_; ++r) {
    std::uint32_t d = s[r];
    for (std::size_t i = 1; i <= len && i < sigma.size(); ++i) d ^= mul(sigma[i], s[r - i]);
    if (d == 0) {
      ++shift;
      continue;
    }
    const std::uint32_t coef = mul(d, inv(prev_disc));
    std::vector<std::uint32_t> next = sigma;
    if (next.size() < prev.size() + shift) next.resize(prev.size() + shift, 0);
    for (std::size_t i = 0; i < prev.size(); ++i) next[i + shift] ^= mul(coef, prev[i]);
    if (2 * len <= r - 1) {
      prev = sigma;
      len = r - len;
      prev_disc = d;
      shift = 1;
    } else {
      ++shift;
    }
    sigma = std::move(next);
  }
  while (sigma.size() > 1 && sigma.back() == 0) sigma.pop_back();
  const std::size_t degree = sigma.size() - 1;
  if (degree != len || degree > t_) return std::nullopt;

  // Chien search: position i is in error iff sigma(alpha^-i) = 0.
  Word out = received;
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    std::uint32_t v = 0;
    for (std::size_t j = 0; j < sigma.size(); ++j) {
      v ^= mul(sigma[j], alpha_pow(-static_cast<std::int64_t>(i * j)));
    }
    if (v == 0) {
      out[i] ^= 1;
      ++roots;
    }
  }
  if (roots != degree) return std::nullopt;
  return out;
}

}  // namespace pufota::fuzzy
