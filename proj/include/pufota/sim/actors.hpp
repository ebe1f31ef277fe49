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
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "pufota/clock.hpp"
#include "pufota/cost.hpp"
#include "pufota/dppuf.hpp"
#include "pufota/fuzzy_extractor.hpp"
#include "pufota/rng.hpp"
#include "pufota/sim/channel.hpp"
#include "pufota/wire.hpp"

namespace pufota::sim {

// Shared environment of one simulation run.
struct World {
  VirtualClock& clock;
  Channel& channel;
  Trace& trace;
  std::uint64_t base_epoch = 0;
  // Public directory: PPUF instance id -> network address.
  std::map<InstanceId, std::string> directory;

  // UNIX seconds at virtual time t.
  std::uint64_t epoch_at(VirtualTime t) const {
    return base_epoch + static_cast<std::uint64_t>(t / kSecond);
  }
  std::uint64_t epoch() const { return epoch_at(clock.now()); }
};

// Serializes one actor's work: a job starts when both the triggering event
// has happened and the previous job is done, and lasts as long as the work
// charged to the meter meanwhile.
class Worker {
 public:
  explicit Worker(const CostModel& costs) : meter_(costs) {}

  VirtualTime begin(VirtualTime now);
  VirtualTime end();  // returns the completion time
  VirtualTime busy_until() const { return busy_until_; }
  // Virtual time reached by the current job so far.
  VirtualTime at() const { return start_ + (meter_.total() - mark_); }

  Meter& meter() { return meter_; }
  const Meter& meter() const { return meter_; }

 private:
  Meter meter_;
  VirtualTime busy_until_ = 0;
  VirtualTime start_ = 0;
  VirtualTime mark_ = 0;
};

enum class RejectCause : std::uint8_t {
  late,
  corrupt,
  forged,
  undecryptable,
  mismatch,
  expired,
  rollback,
  no_pending,
  cooldown,
};

std::string_view to_string(RejectCause cause);

struct EdConfig {
  VirtualTime response_deadline = 2 * kSecond;
  std::uint32_t failure_threshold = 3;
  VirtualTime failure_window = 60 * kSecond;
  VirtualTime cooldown_duration = 3600 * kSecond;
  std::uint64_t set_size = 1'000'000;
  std::size_t noise_flips = 0;

  bool operator==(const EdConfig&) const = default;
};

struct PendingRequest {
  std::uint64_t session = 0;
  std::uint64_t i1 = 0;
  std::uint64_t timestamp = 0;
  SetDescriptor set;
  crypto::Key128 session_key{};
  VirtualTime started = 0;
  VirtualTime deadline = 0;
  bool answered = false;  // a package is being verified
};

struct UpdateOutcome {
  std::uint64_t session = 0;
  bool accepted = false;
  std::optional<RejectCause> cause;
  VirtualTime started = 0;
  VirtualTime decided = 0;
};

struct FailureRecord {
  VirtualTime time = 0;
  RejectCause cause = RejectCause::late;
};

class EmbeddedDevice {
 public:
  EmbeddedDevice(World& world, std::string name, dppuf::DppufInstance dppuf,
                 wire::FirmwareVersion installed, crypto::ProfileId profile, EdConfig config,
                 const CostModel& costs, std::uint64_t seed, InstanceId fds_id,
                 std::string ppmr_address);

  enum class InitiateResult { sent, refused };

  // Step (1). Throws ContractError while a request is pending; refuses
  // during cooldown.
  InitiateResult initiate();

  void on_message(const Message& message);

  const std::string& name() const { return name_; }
  const InstanceId& id() const { return dppuf_.id(); }
  const dppuf::DppufInstance& dppuf() const { return dppuf_; }
  const wire::FirmwareVersion& installed() const { return installed_; }
  const Bytes& firmware() const { return firmware_; }
  const std::optional<PendingRequest>& pending() const { return pending_; }
  std::optional<VirtualTime> cooldown_until() const { return cooldown_until_; }
  bool in_cooldown() const;
  const std::deque<FailureRecord>& failures() const { return failures_; }
  const std::vector<UpdateOutcome>& outcomes() const { return outcomes_; }
  const EdConfig& config() const { return config_; }
  Meter& meter() { return worker_.meter(); }

 private:
  void verify_package(const Message& message, VirtualTime start);
  void reject(RejectCause cause, VirtualTime at, bool log_failure = true);
  void accept(wire::FirmwareVersion fv, Bytes fi, VirtualTime at);

  World& world_;
  std::string name_;
  dppuf::DppufInstance dppuf_;
  wire::FirmwareVersion installed_;
  Bytes firmware_;
  const crypto::CryptoProfile& profile_;
  EdConfig config_;
  Worker worker_;
  Rng rng_;
  InstanceId fds_id_;
  std::string ppmr_;
  std::optional<fuzzy::FuzzyExtractor> extractor_;
  std::optional<PendingRequest> pending_;
  std::uint64_t next_session_ = 1;
  std::deque<FailureRecord> failures_;
  std::optional<VirtualTime> cooldown_until_;
  std::vector<UpdateOutcome> outcomes_;
};

struct FirmwareImage {
  Bytes fi;
  wire::FirmwareVersion fv;
};

struct FdsConfig {
  VirtualTime timestamp_window = 300 * kSecond;
  std::size_t noise_flips = 0;

  bool operator==(const FdsConfig&) const = default;
};

// What the FDS learned while answering one request.
struct FdsSession {
  InstanceId device{};
  std::uint64_t i1 = 0;
  std::uint64_t i2 = 0;
  std::uint64_t timestamp = 0;
  crypto::Key128 session_key{};
  crypto::Nonce nonce_outer{};
  crypto::Nonce nonce_inner{};
  Bytes outer;
};

class DistributionServer {
 public:
  DistributionServer(World& world, std::string name, dppuf::DppufInstance dppuf,
                     crypto::ProfileId profile, FdsConfig config, const CostModel& costs,
                     std::uint64_t seed, std::string ppmr_address);

  // Adds a release. sw_revision must strictly increase per device key.
  void publish(FirmwareImage image);
  const FirmwareImage* latest(const wire::DeviceKey& key) const;
  void clear_repository() { repo_.clear(); }

  // Test fixture: package `image` instead of the latest release, standing in
  // for a genuine package recorded earlier.
  void serve_override(std::optional<FirmwareImage> image) { override_ = std::move(image); }

  void on_message(const Message& message);

  const std::string& name() const { return name_; }
  const InstanceId& id() const { return dppuf_.id(); }
  const dppuf::DppufInstance& dppuf() const { return dppuf_; }
  const std::vector<FdsSession>& sessions() const { return completed_; }
  Meter& meter() { return worker_.meter(); }

 private:
  void handle_request(const Message& message, VirtualTime start);
  void handle_model_response(const Message& message, VirtualTime start);

  World& world_;
  std::string name_;
  dppuf::DppufInstance dppuf_;
  const crypto::CryptoProfile& profile_;
  FdsConfig config_;
  Worker worker_;
  Rng rng_;
  std::string ppmr_;
  std::optional<fuzzy::FuzzyExtractor> extractor_;
  std::map<wire::DeviceKey, std::vector<FirmwareImage>> repo_;
  std::optional<FirmwareImage> override_;
  std::map<InstanceId, FdsSession> open_;
  std::vector<FdsSession> completed_;
};

struct PpmrEntry {
  dppuf::PpufModel model;
  std::optional<fuzzy::HelperData> helper;
};

class ModelRepository {
 public:
  ModelRepository(World& world, std::string name, crypto::ProfileId profile,
                  const CostModel& costs);

  // Append-only: registering an id twice is a ConfigError.
  void register_model(dppuf::PpufModel model, std::optional<fuzzy::HelperData> helper = {});
  // Throws LookupError for unknown ids.
  const PpmrEntry& entry(const InstanceId& id) const;
  const std::map<InstanceId, PpmrEntry>& entries() const { return entries_; }

  // Direct query by any party; the simulation cost is charged to `requester`.
  dppuf::Response challenge_model(const InstanceId& id, const dppuf::Challenge& challenge,
                                  Meter& requester) const;

  void on_message(const Message& message);

  const std::string& name() const { return name_; }
  Meter& meter() { return worker_.meter(); }

 private:
  World& world_;
  std::string name_;
  const crypto::CryptoProfile& profile_;
  Worker worker_;
  std::map<InstanceId, PpmrEntry> entries_;
};

}  // namespace pufota::sim
