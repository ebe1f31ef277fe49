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

#include "pufota/clock.hpp"
#include "pufota/crypto/profile.hpp"

namespace pufota {

// Work categories metered on every actor. hash, timestamp_cipher and
// payload_cipher are the t_hash, t_dec1 and t_dec2 terms of the race
// analysis; checksum and the two PPUF kinds are metered but kept apart.
enum class WorkKind : std::uint8_t {
  hash,
  timestamp_cipher,
  payload_cipher,
  checksum,
  ppuf_hw,
  ppuf_sim,
};
inline constexpr std::size_t kWorkKinds = 6;

std::string_view to_string(WorkKind kind);

struct UnitCost {
  VirtualTime fixed = 0;
  VirtualTime per_kib = 0;  // proportional part, charged per 1024 input bytes

  VirtualTime cost(std::uint64_t bytes) const;
  bool operator==(const UnitCost&) const = default;
};

struct CostModel {
  std::array<UnitCost, kWorkKinds> unit{};
  // Link parameters used by the channel.
  VirtualTime link_latency = 0;
  std::uint64_t link_bytes_per_second = 0;  // 0 = infinite bandwidth

  UnitCost& operator[](WorkKind k) { return unit[static_cast<std::size_t>(k)]; }
  const UnitCost& operator[](WorkKind k) const { return unit[static_cast<std::size_t>(k)]; }

  VirtualTime cost(WorkKind k, std::uint64_t bytes = 0) const { return (*this)[k].cost(bytes); }

  // ppuf_sim / (hash + ppuf_hw) over the fixed parts: the ratio between a
  // model-based and a hardware-based search step, each of which hashes one
  // candidate first.
  std::int64_t esg_factor() const;

  // Sets ppuf_sim to factor * (hash + ppuf_hw). Throws ContractError for a
  // factor below 1.
  CostModel with_esg(std::int64_t factor) const;

  // t_hash = 1, t_dec1 = 4, t_dec2 = 16, ppuf_hw = 1, ppuf_sim = 2000 (ESG
  // 1000), checksum free. Keeps closed-form assertions exact.
  static CostModel symbolic();

  // Per-operation costs fitted once against the measured update times of the
  // three device configurations, then frozen (see bench.hpp).
  static CostModel calibrated(crypto::ProfileId profile);

  bool operator==(const CostModel&) const = default;
};

// Additive, exact integer accounting of one actor's work.
class Meter {
 public:
  explicit Meter(const CostModel& model) : model_(model) {}

  // Charges `units` operations of `kind`, each over `bytes_per_unit` bytes.
  // Returns the virtual time charged.
  VirtualTime charge(WorkKind kind, std::uint64_t units, std::uint64_t bytes_per_unit = 0);

  VirtualTime total(WorkKind kind) const { return totals_[static_cast<std::size_t>(kind)]; }
  std::uint64_t count(WorkKind kind) const { return counts_[static_cast<std::size_t>(kind)]; }

  // Everything charged.
  VirtualTime total() const;
  // hash + timestamp_cipher + payload_cipher only.
  VirtualTime race_total() const;

  const CostModel& model() const { return model_; }

 private:
  CostModel model_;
  std::array<VirtualTime, kWorkKinds> totals_{};
  std::array<std::uint64_t, kWorkKinds> counts_{};
};

}  // namespace pufota
