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
#include <deque>
#include <memory>
#include <string>

#include "pufota/sim/actors.hpp"

namespace pufota::sim {

enum class CostPreset : std::uint8_t { calibrated, symbolic };

std::string_view to_string(CostPreset preset);
CostPreset cost_preset_by_name(std::string_view name);  // throws ConfigError

// Everything that shapes one simulated deployment: one FDS, one PPMR and any
// number of devices sharing a profile.
struct ScenarioConfig {
  crypto::ProfileId profile = crypto::ProfileId::lightweight;
  std::uint64_t seed = 1;
  std::size_t puf_width = 256;
  std::size_t puf_layers = 18;
  CostPreset cost_preset = CostPreset::calibrated;
  std::int64_t esg_factor = 1000;
  LinkParams link;
  std::uint64_t base_epoch = 1'767'225'600;  // 2026-01-01T00:00:00Z
  EdConfig ed;
  FdsConfig fds;
  std::uint64_t firmware_bytes = 323'000;

  // Throws ConfigError.
  void validate() const;
  CostModel costs() const;
  dppuf::DppufConfig puf_config(std::uint64_t puf_seed) const;

  bool operator==(const ScenarioConfig&) const = default;
};

// Firmware line used by every scenario: the device runs revision 1, the
// FDS publishes revision 2 of `firmware_bytes` random bytes.
wire::FirmwareVersion installed_version(const ScenarioConfig& config);
FirmwareImage release_image(const ScenarioConfig& config);
Bytes synthetic_firmware(std::uint64_t size, std::uint64_t seed);

class Simulation {
 public:
  // `costs` replaces config.costs() (calibration runs).
  explicit Simulation(const ScenarioConfig& config, std::optional<CostModel> costs = {});
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // A device with its own PPUF, registered at the PPMR and in the directory.
  // The first one is created by the constructor under the name "ed".
  EmbeddedDevice& add_device(const std::string& name, const wire::FirmwareVersion& installed);

  // initiate() on `device`, then run the event queue dry. Returns the
  // device's last outcome; a refused initiation reports cause cooldown.
  UpdateOutcome run_update(EmbeddedDevice& device);
  UpdateOutcome run_update() { return run_update(device()); }
  void run() { clock_.run(); }

  const ScenarioConfig& config() const { return config_; }
  const CostModel& costs() const { return costs_; }
  VirtualClock& clock() { return clock_; }
  Trace& trace() { return trace_; }
  Channel& channel() { return channel_; }
  World& world() { return world_; }
  ModelRepository& ppmr() { return *ppmr_; }
  DistributionServer& fds() { return *fds_; }
  EmbeddedDevice& device() { return *devices_.front(); }
  EmbeddedDevice& device(const std::string& name);
  const FirmwareImage& release() const { return release_; }

 private:
  ScenarioConfig config_;
  CostModel costs_;
  VirtualClock clock_;
  Trace trace_;
  Channel channel_;
  World world_;
  FirmwareImage release_;
  std::unique_ptr<ModelRepository> ppmr_;
  std::unique_ptr<DistributionServer> fds_;
  std::deque<std::unique_ptr<EmbeddedDevice>> devices_;
};

// Per-phase virtual durations of the first complete session in a trace.
struct PhaseTimes {
  VirtualTime request = 0;   // ED initiate -> request at the FDS
  VirtualTime search = 0;    // FDS preimage search
  VirtualTime package = 0;   // FDS search done -> package sent
  VirtualTime transfer = 0;  // package sent -> package at the ED
  VirtualTime unpack = 0;    // package at the ED -> decision
  VirtualTime total = 0;     // ED initiate -> decision
};
PhaseTimes phase_times(const Trace& trace, const std::string& device = "ed",
                       const std::string& fds = "fds");

}  // namespace pufota::sim
