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
#include <random>

#include "pufota/bits.hpp"

namespace pufota {

// mt19937_64 is fully specified by the standard, so seeded streams are the
// same on every platform. The distribution helpers below are ours for the
// same reason: std::*_distribution output is implementation-defined.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent sub-seed; used to give each subsystem its own stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt + 0x9e3779b97f4a7c15ull));
}

// Uniform in [0, bound). bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Box-Muller.
double standard_normal(Rng& rng);

Bytes random_bytes(Rng& rng, std::size_t n);

}  // namespace pufota
