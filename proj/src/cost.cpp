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

#include "pufota/cost.hpp"

#include "pufota/error.hpp"

namespace pufota {

std::string_view to_string(WorkKind kind) {
  switch (kind) {
    case WorkKind::hash: return "hash";
    case WorkKind::timestamp_cipher: return "timestamp_cipher";
    case WorkKind::payload_cipher: return "payload_cipher";
    case WorkKind::checksum: return "checksum";
    case WorkKind::ppuf_hw: return "ppuf_hw";
    case WorkKind::ppuf_sim: return "ppuf_sim";
  }
  return "?";
}

VirtualTime UnitCost::cost(std::uint64_t bytes) const {
  // Round the proportional part up so a non-empty input is never free.
  const auto b = static_cast<VirtualTime>(bytes);
  return fixed + (per_kib * b + 1023) / 1024;
}

std::int64_t CostModel::esg_factor() const {
  const auto step = (*this)[WorkKind::hash].fixed + (*this)[WorkKind::ppuf_hw].fixed;
  return step > 0 ? (*this)[WorkKind::ppuf_sim].fixed / step : 0;
}

CostModel CostModel::with_esg(std::int64_t factor) const {
  if (factor < 1) throw ContractError("ESG factor must be >= 1");
  CostModel m = *this;
  m[WorkKind::ppuf_sim] = {factor * (m[WorkKind::hash].fixed + m[WorkKind::ppuf_hw].fixed), 0};
  return m;
}

CostModel CostModel::symbolic() {
  CostModel m;
  m[WorkKind::hash] = {1, 0};
  m[WorkKind::timestamp_cipher] = {4, 0};
  m[WorkKind::payload_cipher] = {16, 0};
  m[WorkKind::checksum] = {0, 0};
  m[WorkKind::ppuf_hw] = {1, 0};
  m[WorkKind::ppuf_sim] = {2000, 0};
  return m;
}

CostModel CostModel::calibrated(crypto::ProfileId profile) {
  // Fitted with `pufota bench --calibrate` against the three measured update
  // times per configuration; only payload_cipher.per_kib is fitted.
  struct Fit {
    VirtualTime checksum_per_kib;
    VirtualTime payload_per_kib;
  };
  static constexpr Fit kFits[] = {
      {20'000, 351'601},  // lightweight
      {20'000, 346'041},  // midweight
      {15'000, 348'980},  // heavyweight
  };
  const Fit& f = kFits[static_cast<std::size_t>(profile)];
  CostModel m;
  m[WorkKind::hash] = {1, 0};
  m[WorkKind::timestamp_cipher] = {50, 0};
  m[WorkKind::payload_cipher] = {50, f.payload_per_kib};
  m[WorkKind::checksum] = {0, f.checksum_per_kib};
  m[WorkKind::ppuf_hw] = {1, 0};
  return m.with_esg(1000);
}

VirtualTime Meter::charge(WorkKind kind, std::uint64_t units, std::uint64_t bytes_per_unit) {
  const VirtualTime each = model_.cost(kind, bytes_per_unit);
  const VirtualTime t = each * static_cast<VirtualTime>(units);
  totals_[static_cast<std::size_t>(kind)] += t;
  counts_[static_cast<std::size_t>(kind)] += units;
  return t;
}

VirtualTime Meter::total() const {
  VirtualTime t = 0;
  for (auto v : totals_) t += v;
  return t;
}

VirtualTime Meter::race_total() const {
  return total(WorkKind::hash) + total(WorkKind::timestamp_cipher) + total(WorkKind::payload_cipher);
}

}  // namespace pufota
