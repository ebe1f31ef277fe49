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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pufota/bits.hpp"
#include "pufota/cost.hpp"
#include "pufota/crypto/profile.hpp"
#include "pufota/types.hpp"

namespace pufota::fuzzy {
class FuzzyExtractor;
}

namespace pufota::dppuf {

using Challenge = BitString;
using Response = BitString;

// booster = 2-input XOR stage; represser = NAND-based pair stage.
enum class LayerKind : std::uint8_t { booster, represser };

std::vector<LayerKind> default_layer_pattern();

struct DelayDistribution {
  double mean_ps = 100.0;
  double stddev_ps = 10.0;
  bool operator==(const DelayDistribution&) const = default;
};

struct DppufConfig {
  std::size_t width = 256;
  std::vector<LayerKind> layer_pattern = default_layer_pattern();
  DelayDistribution delay;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
  bool operator==(const DppufConfig&) const = default;
};

// Netlist
// -------
// Each half is a stack of stages over `width` nodes. Stage 0 drives the
// challenge bits; each following stage is one layer of the pattern.
//
//  * booster layer with offset k: node j = XOR(j, (j + k) mod width);
//    arrival = max(inputs) + delay.
//  * represser layer with offset k: nodes j and p = j ^ k (j < p) form a
//    cross-coupled pair reading the same two inputs a = node j, b = node p:
//      j = NAND(a, b),  p = NAND(~a, ~b)
//    A NAND settles on its earliest controlling input (value 0 at the gate
//    pin), otherwise on the latest input.
//
// Layer l uses offset 2^(l mod log2(width)). Every gate has two delays, one
// per output value (rise/fall). Both halves share the netlist and differ only
// in their delay tables. Output bit j is 1 iff the left half's node j settles
// strictly earlier than the right half's (ties give 0).
//
// Delays are stored as integer femtoseconds so evaluation is exact and
// platform independent.
struct DelayTables {
  std::size_t width = 0;
  std::size_t stages = 0;  // layers + 1
  // index: ((stage * 2) + output_value) * width + node
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;

  bool operator==(const DelayTables&) const = default;
};

class DppufInstance {
 public:
  // Samples every gate delay from the configured normal distribution.
  static DppufInstance build(const DppufConfig& config);

  // Assembles an instance from explicit tables (model import, test hooks).
  static DppufInstance from_tables(const DppufConfig& config, const InstanceId& id,
                                   DelayTables tables);

  const DppufConfig& config() const { return config_; }
  const InstanceId& id() const { return id_; }
  std::size_t width() const { return config_.width; }
  const DelayTables& tables() const { return *tables_; }

  Response evaluate(const Challenge& challenge) const;

  // Allocation-free evaluation over packed bytes (width / 8 each).
  void evaluate_into(ByteView challenge, std::span<std::uint8_t> response) const;

 private:
  DppufInstance(DppufConfig config, InstanceId id, std::shared_ptr<const DelayTables> tables);

  DppufConfig config_;
  InstanceId id_{};
  std::shared_ptr<const DelayTables> tables_;
};

// Hardware evaluation charged to `meter` as one ppuf_hw unit.
Response evaluate(const DppufInstance& instance, const Challenge& challenge, Meter& meter);

// Public simulation model as held by the model repository.
struct PpufModel {
  InstanceId id{};
  std::size_t width = 0;
  std::vector<LayerKind> layer_pattern;
  DelayTables tables;
  VirtualTime simulation_cost_per_eval = 0;

  bool operator==(const PpufModel&) const = default;
};

PpufModel export_model(const DppufInstance& instance, VirtualTime simulation_cost_per_eval);

// Bit-identical to evaluate() on the source instance. The meter is charged
// ppuf_sim; the clock overload advances by simulation_cost_per_eval.
Response simulate_model(const PpufModel& model, const Challenge& challenge, Meter& meter);
Response simulate_model(const PpufModel& model, const Challenge& challenge, VirtualClock& clock);

// Canonical text form ("pufota-ppuf-model 1"). Byte-stable for a given model.
std::string serialize_model(const PpufModel& model);
PpufModel parse_model(std::string_view text);

// H(element) mapped onto a width-bit challenge: digests longer than the width
// keep their leading bits; shorter ones are extended with H(x || le32(k)),
// k = 1, 2, ...
Challenge challenge_for_element(const crypto::CryptoProfile& profile, std::uint64_t element,
                                std::size_t width);

// Mean output-bit switch probability when one uniformly chosen input bit of a
// random challenge is flipped. num_vectors >= 100.
double sac_metric(const DppufInstance& instance, std::size_t num_vectors, std::uint64_t seed);

// Per-output-bit flip counts behind sac_metric, for histogram reporting.
struct SacReport {
  double mean = 0.0;
  std::size_t vectors = 0;
  // histogram[k] = number of vectors whose flip changed exactly k output bits
  std::vector<std::size_t> histogram;
};
SacReport sac_report(const DppufInstance& instance, std::size_t num_vectors, std::uint64_t seed);

// How hardware responses are compared with a noise-free target during a
// search. With noise_flips > 0 each candidate's response gets that many
// random bit flips and a match needs the extractor to reconstruct the
// target's codewords.
struct SearchOptions {
  std::size_t noise_flips = 0;
  std::uint64_t noise_seed = 0;
  const fuzzy::FuzzyExtractor* extractor = nullptr;
};

struct SearchOutcome {
  std::optional<std::uint64_t> element;  // first match in set order
  std::uint64_t matches = 0;              // > 1 means a response collision
  std::uint64_t candidates = 0;
};

// Scans the whole set: for every i it hashes i, evaluates the PPUF and
// compares with `target`. The full scan keeps the cost independent of where
// the match sits; each candidate is charged one hash and one ppuf_hw.
SearchOutcome search_preimage(const DppufInstance& instance, const SetDescriptor& set,
                              const Response& target, const crypto::CryptoProfile& profile,
                              Meter& meter, const SearchOptions& options = {});

// Same scan against a public model (what a party without the hardware has to
// do); each candidate is charged one hash and one ppuf_sim.
SearchOutcome search_preimage_simulated(const PpufModel& model, const SetDescriptor& set,
                                        const Response& target,
                                        const crypto::CryptoProfile& profile, Meter& meter);

}  // namespace pufota::dppuf
