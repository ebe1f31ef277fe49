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
#include <string>
#include <vector>

#include "pufota/sim/scenario.hpp"

namespace pufota::bench {

// Update times measured on the reference hardware, in seconds, indexed by
// [profile][size]. These are what the calibrated cost model is fitted to.
inline constexpr std::array<std::uint64_t, 3> kReferenceSizes = {233'000, 323'000, 1'183'000};
inline constexpr double kReferenceSeconds[3][3] = {
    {0.3407, 0.4722, 1.7296},  // lightweight
    {0.3356, 0.4653, 1.7041},  // midweight
    {0.3338, 0.4627, 1.6946},  // heavyweight
};

struct BenchCell {
  crypto::ProfileId profile = crypto::ProfileId::lightweight;
  std::uint64_t firmware_bytes = 0;
  bool accepted = false;
  bool firmware_intact = false;
  VirtualTime virtual_time = 0;
  double wall_seconds = 0.0;
  std::uint64_t bytes_on_wire = 0;
  sim::PhaseTimes phases;
};

struct BenchReport {
  std::vector<BenchCell> cells;

  // For each profile, virtual time strictly increases with firmware size.
  bool monotonic_in_size() const;
  std::string to_jsonl() const;
  std::string summary_table() const;
};

// One honest update of `firmware_bytes` under `base` with the profile
// replaced. `costs` overrides the configured cost model.
BenchCell run_cell(sim::ScenarioConfig base, crypto::ProfileId profile,
                   std::uint64_t firmware_bytes, std::optional<CostModel> costs = {});

// Every profile x size combination, in profile-major order.
BenchReport run_grid(const sim::ScenarioConfig& base, const std::vector<std::uint64_t>& sizes);

// Largest |simulated / reference - 1| over one profile's three cells.
double worst_relative_error(const std::array<VirtualTime, 3>& simulated,
                            crypto::ProfileId profile);

struct CalibrationFit {
  crypto::ProfileId profile = crypto::ProfileId::lightweight;
  VirtualTime payload_per_kib = 0;
  std::array<VirtualTime, 3> predicted{};
  double worst_error = 0.0;
};

// Fits payload_cipher.per_kib per profile, all other unit costs held at
// CostModel::calibrated. Once the payload cipher dominates the FDS's wait for
// the model response, virtual time is affine in that one parameter, so two
// probe runs per cell give the line; the fit minimizes the worst relative
// error over the three reference sizes.
std::vector<CalibrationFit> calibrate(const sim::ScenarioConfig& base);

}  // namespace pufota::bench
