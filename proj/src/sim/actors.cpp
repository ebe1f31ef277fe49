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

#include "pufota/sim/actors.hpp"

#include <algorithm>

#include "pufota/error.hpp"

namespace pufota::sim {
namespace {

using wire::MessageKind;

crypto::Nonce random_nonce(Rng& rng) {
  crypto::Nonce n{};
  const Bytes b = random_bytes(rng, n.size());
  std::copy(b.begin(), b.end(), n.begin());
  return n;
}

std::optional<MessageKind> kind_of(const Message& m) {
  try {
    return wire::peek_kind(m.bytes);
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

std::optional<fuzzy::FuzzyExtractor> make_extractor(std::size_t noise, std::size_t width) {
  if (noise == 0) return std::nullopt;
  return fuzzy::FuzzyExtractor(fuzzy::BchCode::default_code(), width);
}

dppuf::SearchOptions search_options(std::size_t noise, std::uint64_t seed,
                                    const std::optional<fuzzy::FuzzyExtractor>& fe) {
  dppuf::SearchOptions o;
  o.noise_flips = noise;
  o.noise_seed = seed;
  o.extractor = fe ? &*fe : nullptr;
  return o;
}

}  // namespace

VirtualTime Worker::begin(VirtualTime now) {
  start_ = std::max(now, busy_until_);
  mark_ = meter_.total();
  return start_;
}

VirtualTime Worker::end() {
  busy_until_ = start_ + (meter_.total() - mark_);
  return busy_until_;
}

std::string_view to_string(RejectCause cause) {
  switch (cause) {
    case RejectCause::late: return "late";
    case RejectCause::corrupt: return "corrupt";
    case RejectCause::forged: return "forged";
    case RejectCause::undecryptable: return "undecryptable";
    case RejectCause::mismatch: return "mismatch";
    case RejectCause::expired: return "expired";
    case RejectCause::rollback: return "rollback";
    case RejectCause::no_pending: return "no_pending";
    case RejectCause::cooldown: return "cooldown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Embedded device

EmbeddedDevice::EmbeddedDevice(World& world, std::string name, dppuf::DppufInstance dppuf,
                               wire::FirmwareVersion installed, crypto::ProfileId profile,
                               EdConfig config, const CostModel& costs, std::uint64_t seed,
                               InstanceId fds_id, std::string ppmr_address)
    : world_(world),
      name_(std::move(name)),
      dppuf_(std::move(dppuf)),
      installed_(installed),
      profile_(crypto::profile(profile)),
      config_(config),
      worker_(costs),
      rng_(seed),
      fds_id_(fds_id),
      ppmr_(std::move(ppmr_address)),
      extractor_(make_extractor(config.noise_flips, dppuf_.width())) {
  if (config_.set_size == 0 || config_.set_size > SetDescriptor::kMaxCount) {
    throw ConfigError("set size must be in [1, 2^20 - 1]");
  }
  if (config_.failure_threshold == 0) throw ConfigError("failure threshold must be >= 1");
  if (config_.response_deadline <= 0) throw ConfigError("response deadline must be positive");
}

bool EmbeddedDevice::in_cooldown() const {
  return cooldown_until_ && world_.clock.now() < *cooldown_until_;
}

EmbeddedDevice::InitiateResult EmbeddedDevice::initiate() {
  const VirtualTime now = world_.clock.now();
  if (in_cooldown()) {
    world_.trace.add(now, name_, "refuse", "cooldown");
    return InitiateResult::refused;
  }
  if (pending_) throw ContractError("an update request is already pending");

  worker_.begin(now);
  Meter& meter = worker_.meter();
  PendingRequest p;
  p.session = next_session_++;
  p.set.s0 = uniform_below(rng_, std::uint64_t{1} << 48);
  p.set.n = config_.set_size;
  p.i1 = p.set.s0 + uniform_below(rng_, p.set.n);
  p.timestamp = world_.epoch();
  p.started = now;
  p.deadline = now + config_.response_deadline;

  const crypto::Key128 k1 = crypto::kdf_from_element(profile_, p.i1);
  p.session_key = crypto::derive_session_key(k1, p.timestamp);

  wire::RelayRequest relay;
  relay.fds_id = fds_id_;
  relay.challenge = dppuf::challenge_for_element(profile_, p.i1, dppuf_.width());
  meter.charge(WorkKind::hash, 1);
  auto& req = relay.request;
  req.profile = profile_.id;
  req.set = p.set;
  req.device_id = dppuf_.id();
  req.device = installed_.key();
  req.nonce = random_nonce(rng_);
  req.encrypted_timestamp =
      crypto::encrypt(profile_, k1, wire::timestamp_block(p.timestamp), req.nonce);
  meter.charge(WorkKind::timestamp_cipher, 1, 16);
  Bytes frame = wire::encode(relay);
  meter.charge(WorkKind::checksum, 1, frame.size());

  pending_ = p;
  world_.trace.add(now, name_, "initiate");
  world_.channel.send(name_, ppmr_, std::move(frame), worker_.end());

  const std::uint64_t session = p.session;
  world_.clock.schedule(p.deadline + 1, [this, session] {
    if (pending_ && pending_->session == session && !pending_->answered) reject(RejectCause::late, world_.clock.now());
  });
  return InitiateResult::sent;
}

void EmbeddedDevice::on_message(const Message& message) {
  // Devices only ever expect firmware packages; anything else is treated as
  // a damaged one.
  const VirtualTime start = worker_.begin(world_.clock.now());
  verify_package(message, start);
}

void EmbeddedDevice::verify_package(const Message& message, VirtualTime /*start*/) {
  const VirtualTime arrival = world_.clock.now();
  Meter& meter = worker_.meter();
  // Decisions take effect once the device has finished the work they needed.
  auto decide = [&](std::optional<RejectCause> cause, wire::FirmwareVersion fv = {},
                    Bytes fi = {}) {
    const VirtualTime done = worker_.end();
    const bool log = cause != RejectCause::cooldown;
    world_.clock.schedule(done, [this, cause, fv, fi = std::move(fi), log]() mutable {
      if (cause) {
        reject(*cause, world_.clock.now(), log);
      } else {
        accept(fv, std::move(fi), world_.clock.now());
      }
    });
  };

  if (cooldown_until_ && arrival < *cooldown_until_) return decide(RejectCause::cooldown);
  if (!pending_ || pending_->answered) return decide(RejectCause::no_pending);
  const PendingRequest p = *pending_;
  // Single-flight: this package answers the pending request, whatever the
  // verdict.
  pending_->answered = true;

  // 1. deadline
  if (arrival > p.deadline) return decide(RejectCause::late);

  // 2. checksum
  meter.charge(WorkKind::checksum, 1, message.bytes.size());
  wire::FirmwarePackage fp;
  try {
    fp = wire::decode_firmware_package(message.bytes, profile_.id);
  } catch (const DecodeError&) {
    return decide(RejectCause::corrupt);
  }

  // 3. I2 preimage
  if (fp.o2.size() != dppuf_.width()) return decide(RejectCause::forged);
  const auto found = dppuf::search_preimage(
      dppuf_, p.set, fp.o2, profile_, meter,
      search_options(config_.noise_flips, mix_seed(p.session, p.i1), extractor_));
  if (!found.element) return decide(RejectCause::forged);
  world_.trace.add(worker_.at(), name_, "i2_found");

  // 4. outer then inner layer
  wire::InnerPayload inner;
  try {
    const crypto::Key128 k2 = crypto::kdf_from_element(profile_, *found.element);
    const Bytes middle = crypto::decrypt(profile_, k2, fp.payload, fp.nonce_outer);
    meter.charge(WorkKind::payload_cipher, 1, fp.payload.size());
    const Bytes plain = crypto::decrypt(profile_, p.session_key, middle, fp.nonce_inner);
    meter.charge(WorkKind::payload_cipher, 1, middle.size());
    meter.charge(WorkKind::checksum, 1, plain.size());
    inner = wire::decode_inner(profile_, plain);
  } catch (const AuthError&) {
    return decide(RejectCause::undecryptable);
  } catch (const DecodeError&) {
    return decide(RejectCause::undecryptable);
  }

  // 5. identifiers
  if (inner.fv.key() != installed_.key()) return decide(RejectCause::mismatch);
  // 6. best-before
  if (!(inner.fv.best_before > world_.epoch_at(arrival))) return decide(RejectCause::expired);
  // 7. both the release time and the revision must move forward
  if (!(inner.fv.release_ts > installed_.release_ts &&
        inner.fv.sw_revision > installed_.sw_revision)) {
    return decide(RejectCause::rollback);
  }
  decide(std::nullopt, inner.fv, std::move(inner.fi));
}

void EmbeddedDevice::accept(wire::FirmwareVersion fv, Bytes fi, VirtualTime at) {
  UpdateOutcome o;
  o.session = pending_ ? pending_->session : 0;
  o.accepted = true;
  o.started = pending_ ? pending_->started : at;
  o.decided = at;
  installed_ = fv;
  firmware_ = std::move(fi);
  pending_.reset();
  outcomes_.push_back(o);
  world_.trace.add(at, name_, "accept", "sw_revision " + std::to_string(fv.sw_revision));
}

void EmbeddedDevice::reject(RejectCause cause, VirtualTime at, bool log_failure) {
  UpdateOutcome o;
  o.cause = cause;
  o.decided = at;
  if (pending_) {
    o.session = pending_->session;
    o.started = pending_->started;
  }
  if (cause != RejectCause::cooldown && cause != RejectCause::no_pending) pending_.reset();
  outcomes_.push_back(o);
  world_.trace.add(at, name_, "reject", to_string(cause));
  if (!log_failure) return;

  failures_.push_back({at, cause});
  while (!failures_.empty() && failures_.front().time <= at - config_.failure_window) {
    failures_.pop_front();
  }
  if (failures_.size() >= config_.failure_threshold) {
    cooldown_until_ = at + config_.cooldown_duration;
    failures_.clear();
    pending_.reset();
    world_.trace.add(at, name_, "cooldown", "until " + std::to_string(*cooldown_until_));
  }
}

// ---------------------------------------------------------------------------
// Firmware distribution server

DistributionServer::DistributionServer(World& world, std::string name,
                                       dppuf::DppufInstance dppuf, crypto::ProfileId profile,
                                       FdsConfig config, const CostModel& costs,
                                       std::uint64_t seed, std::string ppmr_address)
    : world_(world),
      name_(std::move(name)),
      dppuf_(std::move(dppuf)),
      profile_(crypto::profile(profile)),
      config_(config),
      worker_(costs),
      rng_(seed),
      ppmr_(std::move(ppmr_address)),
      extractor_(make_extractor(config.noise_flips, dppuf_.width())) {}

void DistributionServer::publish(FirmwareImage image) {
  auto& line = repo_[image.fv.key()];
  if (!line.empty() && image.fv.sw_revision <= line.back().fv.sw_revision) {
    throw ConfigError("sw_revision must strictly increase per device key");
  }
  if (image.fv.best_before <= image.fv.release_ts) {
    throw ConfigError("best_before must be later than release_ts");
  }
  line.push_back(std::move(image));
}

const FirmwareImage* DistributionServer::latest(const wire::DeviceKey& key) const {
  auto it = repo_.find(key);
  return it == repo_.end() || it->second.empty() ? nullptr : &it->second.back();
}

void DistributionServer::on_message(const Message& message) {
  const auto kind = kind_of(message);
  const VirtualTime start = worker_.begin(world_.clock.now());
  if (kind == MessageKind::update_request) {
    handle_request(message, start);
  } else if (kind == MessageKind::model_response) {
    handle_model_response(message, start);
  } else {
    world_.trace.add(world_.clock.now(), name_, "ignore", "unexpected message");
  }
  worker_.end();
}

void DistributionServer::handle_request(const Message& message, VirtualTime start) {
  Meter& meter = worker_.meter();
  auto drop = [&](std::string_view why) { world_.trace.add(worker_.at(), name_, "drop_request", why); };

  meter.charge(WorkKind::checksum, 1, message.bytes.size());
  wire::UpdateRequest req;
  try {
    req = wire::decode_update_request(message.bytes, profile_.id);
  } catch (const NegotiationError&) {
    return drop("negotiation");
  } catch (const DecodeError&) {
    return drop("corrupt");
  }
  if (req.o1.size() != dppuf_.width()) return drop("forged");

  const auto found = dppuf::search_preimage(
      dppuf_, req.set, req.o1, profile_, meter,
      search_options(config_.noise_flips, mix_seed(req.set.s0, 0xfd5), extractor_));
  if (!found.element) return drop("forged");
  world_.trace.add(worker_.at(), name_, "i1_found");

  FdsSession s;
  s.device = req.device_id;
  s.i1 = *found.element;
  const crypto::Key128 k1 = crypto::kdf_from_element(profile_, s.i1);
  try {
    const Bytes block = crypto::decrypt(profile_, k1, req.encrypted_timestamp, req.nonce);
    meter.charge(WorkKind::timestamp_cipher, 1, 16);
    s.timestamp = wire::parse_timestamp_block(block);
  } catch (const AuthError&) {
    return drop("undecryptable");
  } catch (const DecodeError&) {
    return drop("implausible_timestamp");
  }
  const auto now_epoch = static_cast<std::int64_t>(world_.epoch_at(start));
  const auto window = config_.timestamp_window / kSecond;
  const auto skew = static_cast<std::int64_t>(s.timestamp) - now_epoch;
  if (skew < -window || skew > window) return drop("implausible_timestamp");

  const FirmwareImage* image = override_ ? &*override_ : latest(req.device);
  if (image == nullptr) return drop("no_firmware");
  s.session_key = crypto::derive_session_key(k1, s.timestamp);

  const Bytes inner = wire::encode_inner(profile_, image->fi, image->fv);
  meter.charge(WorkKind::checksum, 1, inner.size());
  s.nonce_inner = random_nonce(rng_);
  const Bytes middle = crypto::encrypt(profile_, s.session_key, inner, s.nonce_inner);
  meter.charge(WorkKind::payload_cipher, 1, inner.size());

  s.i2 = req.set.s0 + uniform_below(rng_, req.set.n);
  wire::ModelQuery q;
  q.profile = profile_.id;
  q.target = req.device_id;
  q.challenge = dppuf::challenge_for_element(profile_, s.i2, dppuf_.width());
  meter.charge(WorkKind::hash, 1);
  Bytes query = wire::encode(q);
  meter.charge(WorkKind::checksum, 1, query.size());
  // The query leaves now; the outer layer is computed while waiting for O2.
  world_.channel.send(name_, ppmr_, std::move(query), worker_.end());
  worker_.begin(worker_.busy_until());

  s.nonce_outer = random_nonce(rng_);
  s.outer = crypto::encrypt(profile_, crypto::kdf_from_element(profile_, s.i2), middle,
                            s.nonce_outer);
  meter.charge(WorkKind::payload_cipher, 1, middle.size());
  world_.trace.add(worker_.at(), name_, "package_ready");
  open_[s.device] = std::move(s);
}

void DistributionServer::handle_model_response(const Message& message, VirtualTime start) {
  Meter& meter = worker_.meter();
  meter.charge(WorkKind::checksum, 1, message.bytes.size());
  wire::ModelResponse r;
  try {
    r = wire::decode_model_response(message.bytes, profile_.id);
  } catch (const DecodeError&) {
    world_.trace.add(start, name_, "drop_response", "corrupt");
    return;
  }
  auto it = open_.find(r.target);
  if (it == open_.end()) {
    world_.trace.add(start, name_, "drop_response", "no_session");
    return;
  }
  FdsSession s = std::move(it->second);
  open_.erase(it);

  wire::FirmwarePackage fp;
  fp.profile = profile_.id;
  fp.nonce_outer = s.nonce_outer;
  fp.nonce_inner = s.nonce_inner;
  fp.o2 = r.response;
  fp.payload = s.outer;
  Bytes frame = wire::encode(fp);
  meter.charge(WorkKind::checksum, 1, frame.size());

  auto dest = world_.directory.find(s.device);
  if (dest == world_.directory.end()) {
    world_.trace.add(start, name_, "drop_response", "unknown_device");
    return;
  }
  const VirtualTime done = worker_.end();
  world_.trace.add(done, name_, "package_sent");
  worker_.begin(done);
  world_.channel.send(name_, dest->second, std::move(frame), done);
  completed_.push_back(std::move(s));
}

// ---------------------------------------------------------------------------
// Public PUF model repository

ModelRepository::ModelRepository(World& world, std::string name, crypto::ProfileId profile,
                                 const CostModel& costs)
    : world_(world), name_(std::move(name)), profile_(crypto::profile(profile)), worker_(costs) {}

void ModelRepository::register_model(dppuf::PpufModel model,
                                     std::optional<fuzzy::HelperData> helper) {
  const InstanceId id = model.id;
  if (entries_.contains(id)) throw ConfigError("model " + to_hex(id) + " already registered");
  entries_.emplace(id, PpmrEntry{std::move(model), std::move(helper)});
}

const PpmrEntry& ModelRepository::entry(const InstanceId& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw LookupError("no model registered for " + to_hex(id));
  return it->second;
}

dppuf::Response ModelRepository::challenge_model(const InstanceId& id,
                                                 const dppuf::Challenge& challenge,
                                                 Meter& requester) const {
  return dppuf::simulate_model(entry(id).model, challenge, requester);
}

void ModelRepository::on_message(const Message& message) {
  const VirtualTime start = worker_.begin(world_.clock.now());
  Meter& meter = worker_.meter();
  auto drop = [&](std::string_view why) { world_.trace.add(worker_.at(), name_, "drop", why); };
  const auto kind = kind_of(message);
  meter.charge(WorkKind::checksum, 1, message.bytes.size());
  try {
    if (kind == MessageKind::relay_request) {
      wire::RelayRequest relay = wire::decode_relay_request(message.bytes, profile_.id);
      wire::UpdateRequest req = relay.request;
      req.o1 = dppuf::simulate_model(entry(relay.fds_id).model, relay.challenge, meter);
      auto dest = world_.directory.find(relay.fds_id);
      if (dest == world_.directory.end()) throw LookupError("FDS address unknown");
      Bytes frame = wire::encode(req);
      meter.charge(WorkKind::checksum, 1, frame.size());
      world_.trace.add(start, name_, "relay");
      world_.channel.send(name_, dest->second, std::move(frame), worker_.end());
    } else if (kind == MessageKind::model_query) {
      const wire::ModelQuery q = wire::decode_model_query(message.bytes, profile_.id);
      wire::ModelResponse r;
      r.profile = profile_.id;
      r.target = q.target;
      r.response = dppuf::simulate_model(entry(q.target).model, q.challenge, meter);
      Bytes frame = wire::encode(r);
      meter.charge(WorkKind::checksum, 1, frame.size());
      world_.trace.add(start, name_, "answer_query");
      world_.channel.send(name_, message.from, std::move(frame), worker_.end());
    } else {
      drop("unexpected message");
    }
  } catch (const DecodeError&) {
    drop("corrupt");
  } catch (const LookupError&) {
    drop("unknown_model");
  } catch (const ContractError&) {
    drop("malformed");
  }
  worker_.end();
}

}  // namespace pufota::sim
