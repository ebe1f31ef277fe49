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
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pufota/sim/scenario.hpp"

namespace pufota::attacks {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

struct AttackOutcome {
  std::string scenario;
  bool adversary_succeeded = false;
  std::optional<sim::RejectCause> rejection_cause;  // first verdict at the target ED
  bool control_accepted = false;                    // paired honest run
  VirtualTime adversary_time = 0;                   // adversary meter, all kinds
  VirtualTime server_time = 0;                      // honest FDS meter, all kinds
  VirtualTime deadline = 0;                         // ED response deadline in force
  // Secondary checks of the driver, "name: observed".
  std::vector<std::string> checks;
  bool checks_passed = true;

  // Attack defeated, control accepted and every secondary check as expected.
  bool passed() const { return !adversary_succeeded && control_accepted && checks_passed; }
  std::string to_json() const;
};

// Honest end-to-end update under `config`.
struct ControlRun {
  bool accepted = false;
  bool firmware_intact = false;
  VirtualTime session_time = 0;  // initiate -> decision
  VirtualTime server_time = 0;   // FDS meter
};
ControlRun run_control(const sim::ScenarioConfig& config);

// Each driver runs its own control unless one for the same config is given.
AttackOutcome run_rollback_attack(const sim::ScenarioConfig& config,
                                  const ControlRun* control = nullptr);
AttackOutcome run_mismatch_attack(const sim::ScenarioConfig& config,
                                  const ControlRun* control = nullptr);
AttackOutcome run_obsolete_attack(const sim::ScenarioConfig& config,
                                  const ControlRun* control = nullptr);
// Tunes the deadline to twice the honest session time of a tiny firmware and
// requires the adversary's metered time to exceed it by `min_margin`.
AttackOutcome run_redirection_attack(const sim::ScenarioConfig& config, double min_margin = 100.0);
AttackOutcome run_tamper_attack(const sim::ScenarioConfig& config,
                                const ControlRun* control = nullptr);
// Trial 0 runs at the configured set size, the others at most 4096 elements;
// the set size does not touch the encryption layers being observed.
AttackOutcome run_interception_analysis(const sim::ScenarioConfig& config,
                                        std::size_t trials = 100);

inline constexpr std::string_view kStrideScenarios[] = {"rollback", "mismatch", "obsolete",
                                                        "redirect", "tamper",   "intercept"};
AttackOutcome run_scenario(std::string_view name, const sim::ScenarioConfig& config,
                           const ControlRun* control = nullptr);

// Dictionary sizing
// -----------------
// Parses a probability written as a plain decimal ("0.01", "1", "1e-3") into
// an exact rational. Throws ContractError outside [0, 1] or on bad syntax.
BigRational parse_probability(std::string_view text);

// x = ceil(c * 2^bits).
BigInt dictionary_size_for_probability(const BigRational& c, unsigned bits = 256);
// c = x / 2^bits. Throws ContractError when x > 2^bits.
BigRational dictionary_probability(const BigInt& x, unsigned bits = 256);

struct DictionarySizing {
  BigRational probability;
  BigInt entries;
  // 2 bits per entry: the "2 * 2^256 bits" reading of a full dictionary.
  BigInt storage_bits;
  // One challenge and one response of `bits` each per entry.
  BigInt pair_storage_bits;
};
DictionarySizing size_dictionary(const BigRational& c, unsigned bits = 256);

// Decimal scientific notation with `digits` significant digits, rounded half
// up, e.g. "1.16e75".
std::string to_scientific(const BigRational& value, unsigned digits);
std::string to_scientific(const BigInt& value, unsigned digits);
// bits -> petabytes (10^15 bytes), exact.
BigRational bits_to_petabytes(const BigInt& bits);

// Man-in-the-middle race
// ----------------------
struct RaceCosts {
  VirtualTime t_hash = 1;
  VirtualTime t_dec1 = 4;
  VirtualTime t_dec2 = 16;
  std::uint64_t n = 1'000'000;
};

struct RaceAnalysis {
  VirtualTime attacker_time = 0;  // (n + 2) t_hash + t_dec1 + 4 t_dec2
  VirtualTime server_time = 0;    // (n + 1) t_hash + t_dec1 + 2 t_dec2
  bool server_advantage = false;  // t_hash + 2 t_dec2 > t_dec2
};
// Throws ContractError for non-positive costs or n == 0.
RaceAnalysis mitm_race_analysis(const RaceCosts& costs);

// The race played out on the simulated network under the symbolic cost
// model: the adversary reads the announced set and both hashed elements,
// rebuilds the package around its own firmware and forwards it.
struct MitmRun {
  RaceCosts costs;
  RaceAnalysis closed_form;
  VirtualTime attacker_meter = 0;  // race kinds only
  VirtualTime server_meter = 0;    // race kinds only
  bool meters_match = false;
  bool keys_recovered = false;
  bool substituted_firmware_installed = false;
  std::optional<sim::RejectCause> device_cause;
  std::string to_json() const;
};
MitmRun run_mitm_simulation(const sim::ScenarioConfig& config);

}  // namespace pufota::attacks
