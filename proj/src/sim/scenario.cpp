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

#include "pufota/sim/scenario.hpp"

#include <algorithm>

#include "pufota/error.hpp"

namespace pufota::sim {
namespace {

constexpr std::uint64_t kDay = 86'400;

std::vector<dppuf::LayerKind> alternating_layers(std::size_t count) {
  std::vector<dppuf::LayerKind> layers(count);
  for (std::size_t i = 0; i < count; ++i) {
    layers[i] = i % 2 == 0 ? dppuf::LayerKind::booster : dppuf::LayerKind::represser;
  }
  return layers;
}

}  // namespace

std::string_view to_string(CostPreset preset) {
  return preset == CostPreset::symbolic ? "symbolic" : "calibrated";
}

CostPreset cost_preset_by_name(std::string_view name) {
  if (name == "calibrated") return CostPreset::calibrated;
  if (name == "symbolic") return CostPreset::symbolic;
  throw ConfigError("unknown cost preset '" + std::string(name) + "'");
}

void ScenarioConfig::validate() const {
  puf_config(seed).validate();
  if (esg_factor < 1) throw ConfigError("esg_factor must be >= 1");
  if (link.latency < 0) throw ConfigError("link latency must be >= 0");
  if (ed.set_size == 0 || ed.set_size > SetDescriptor::kMaxCount) {
    throw ConfigError("set_size must be in [1, 2^20 - 1]");
  }
  if (ed.response_deadline <= 0) throw ConfigError("response_deadline must be positive");
  if (ed.failure_threshold == 0) throw ConfigError("failure_threshold must be >= 1");
  if (ed.failure_window <= 0 || ed.cooldown_duration <= 0) {
    throw ConfigError("failure_window and cooldown_duration must be positive");
  }
  if (fds.timestamp_window < 0) throw ConfigError("timestamp_window must be >= 0");
  if (ed.noise_flips > puf_width || fds.noise_flips > puf_width) {
    throw ConfigError("noise flips exceed the response width");
  }
  if ((ed.noise_flips > 0 || fds.noise_flips > 0) && puf_width != 256) {
    throw ConfigError("noisy responses need the 256-bit extractor layout");
  }
  if (firmware_bytes > (std::uint64_t{1} << 32)) throw ConfigError("firmware too large");
}

CostModel ScenarioConfig::costs() const {
  CostModel m = cost_preset == CostPreset::symbolic ? CostModel::symbolic()
                                                    : CostModel::calibrated(profile);
  m = m.with_esg(esg_factor);
  m.link_latency = link.latency;
  m.link_bytes_per_second = link.bytes_per_second;
  return m;
}

dppuf::DppufConfig ScenarioConfig::puf_config(std::uint64_t puf_seed) const {
  dppuf::DppufConfig c;
  c.width = puf_width;
  c.layer_pattern = alternating_layers(puf_layers);
  c.seed = puf_seed;
  return c;
}

wire::FirmwareVersion installed_version(const ScenarioConfig& config) {
  wire::FirmwareVersion fv;
  fv.vendor_id = 0x5a17;
  fv.device_type = 0x0102;
  fv.hw_revision = 3;
  fv.sw_revision = 1;
  fv.release_ts = config.base_epoch - 90 * kDay;
  fv.best_before = config.base_epoch + 275 * kDay;
  return fv;
}

FirmwareImage release_image(const ScenarioConfig& config) {
  FirmwareImage image;
  image.fv = installed_version(config);
  image.fv.sw_revision = 2;
  image.fv.release_ts = config.base_epoch - kDay;
  image.fv.best_before = config.base_epoch + 365 * kDay;
  image.fi = synthetic_firmware(config.firmware_bytes, mix_seed(config.seed, 0xf1));
  return image;
}

Bytes synthetic_firmware(std::uint64_t size, std::uint64_t seed) {
  Rng rng(seed);
  return random_bytes(rng, size);
}

Simulation::Simulation(const ScenarioConfig& config, std::optional<CostModel> costs)
    : config_(config),
      costs_((config.validate(), costs ? *costs : config.costs())),
      channel_(clock_, trace_, config.link),
      world_{clock_, channel_, trace_, config.base_epoch, {}},
      release_(release_image(config)) {
  ppmr_ = std::make_unique<ModelRepository>(world_, "ppmr", config_.profile, costs_);
  auto fds_puf = dppuf::DppufInstance::build(config_.puf_config(mix_seed(config_.seed, 0xfd5)));
  ppmr_->register_model(dppuf::export_model(fds_puf, costs_[WorkKind::ppuf_sim].fixed));
  world_.directory[fds_puf.id()] = "fds";
  fds_ = std::make_unique<DistributionServer>(world_, "fds", std::move(fds_puf), config_.profile,
                                              config_.fds, costs_,
                                              mix_seed(config_.seed, 0xfd5eed), "ppmr");
  fds_->publish(release_);
  channel_.attach("ppmr", [this](const Message& m) { ppmr_->on_message(m); });
  channel_.attach("fds", [this](const Message& m) { fds_->on_message(m); });
  add_device("ed", installed_version(config_));
}

EmbeddedDevice& Simulation::add_device(const std::string& name,
                                       const wire::FirmwareVersion& installed) {
  if (name == "fds" || name == "ppmr" ||
      std::any_of(devices_.begin(), devices_.end(),
                  [&](const auto& d) { return d->name() == name; })) {
    throw ConfigError("duplicate actor name '" + name + "'");
  }
  const std::uint64_t index = devices_.size();
  auto puf = dppuf::DppufInstance::build(config_.puf_config(mix_seed(config_.seed, 0xed00 + index)));
  ppmr_->register_model(dppuf::export_model(puf, costs_[WorkKind::ppuf_sim].fixed));
  world_.directory[puf.id()] = name;
  devices_.push_back(std::make_unique<EmbeddedDevice>(
      world_, name, std::move(puf), installed, config_.profile, config_.ed, costs_,
      mix_seed(config_.seed, 0xed5eed + index), fds_->id(), "ppmr"));
  EmbeddedDevice* d = devices_.back().get();
  channel_.attach(name, [d](const Message& m) { d->on_message(m); });
  return *d;
}

EmbeddedDevice& Simulation::device(const std::string& name) {
  for (auto& d : devices_) {
    if (d->name() == name) return *d;
  }
  throw LookupError("no device named '" + name + "'");
}

UpdateOutcome Simulation::run_update(EmbeddedDevice& device) {
  if (device.initiate() == EmbeddedDevice::InitiateResult::refused) {
    UpdateOutcome o;
    o.cause = RejectCause::cooldown;
    o.started = o.decided = clock_.now();
    return o;
  }
  clock_.run();
  if (device.outcomes().empty()) throw ContractError("update session ended without a decision");
  return device.outcomes().back();
}

PhaseTimes phase_times(const Trace& trace, const std::string& device, const std::string& fds) {
  std::optional<VirtualTime> initiate, at_fds, found, sent, at_ed, decided;
  for (const auto& r : trace.records()) {
    if (r.actor == device && r.event == "initiate" && !initiate) initiate = r.time;
    if (!initiate) continue;
    if (r.actor == fds && r.event == "receive" && r.cause == "update_request" && !at_fds)
      at_fds = r.time;
    if (r.actor == fds && r.event == "i1_found" && !found) found = r.time;
    if (r.actor == fds && r.event == "send" && r.cause == "firmware_package" && !sent)
      sent = r.time;
    if (r.actor == device && r.event == "receive" && r.cause == "firmware_package" && !at_ed)
      at_ed = r.time;
    if (r.actor == device && (r.event == "accept" || r.event == "reject") && !decided) {
      decided = r.time;
      break;
    }
  }
  if (!initiate || !at_fds || !found || !sent || !at_ed || !decided) {
    throw LookupError("trace holds no complete update session");
  }
  PhaseTimes p;
  p.request = *at_fds - *initiate;
  p.search = *found - *at_fds;
  p.package = *sent - *found;
  p.transfer = *at_ed - *sent;
  p.unpack = *decided - *at_ed;
  p.total = *decided - *initiate;
  return p;
}

}  // namespace pufota::sim
