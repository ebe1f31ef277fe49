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

#include <algorithm>
#include <limits>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "pufota/attacks.hpp"
#include "pufota/error.hpp"

namespace pufota::attacks {
namespace {

using sim::EmbeddedDevice;
using sim::FirmwareImage;
using sim::Message;
using sim::RejectCause;
using sim::ScenarioConfig;
using sim::Simulation;
using wire::MessageKind;

constexpr std::uint64_t kDay = 86'400;

bool is_kind(const Message& m, MessageKind kind) {
  try {
    return wire::peek_kind(m.bytes) == kind;
  } catch (const DecodeError&) {
    return false;
  }
}

std::optional<RejectCause> first_verdict(const EmbeddedDevice& d, std::size_t from = 0) {
  if (d.outcomes().size() <= from) return std::nullopt;
  return d.outcomes()[from].cause;
}

bool accepted_any(const EmbeddedDevice& d, std::size_t from = 0) {
  return std::any_of(d.outcomes().begin() + static_cast<std::ptrdiff_t>(from), d.outcomes().end(),
                     [](const auto& o) { return o.accepted; });
}

std::string cause_name(std::optional<RejectCause> c) {
  return c ? std::string(sim::to_string(*c)) : std::string("accept");
}

crypto::Nonce nonce_from(Rng& rng) {
  crypto::Nonce n{};
  const Bytes b = random_bytes(rng, n.size());
  std::copy(b.begin(), b.end(), n.begin());
  return n;
}

// Builds a well-formed package around `image` from keys the adversary holds.
Bytes forge_package(const crypto::CryptoProfile& p, const crypto::Key128& sk, std::uint64_t i2,
                    const BitString& o2, const FirmwareImage& image, Rng& rng, Meter& meter) {
  const Bytes inner = wire::encode_inner(p, image.fi, image.fv);
  meter.charge(WorkKind::checksum, 1, inner.size());
  wire::FirmwarePackage fp;
  fp.profile = p.id;
  fp.nonce_inner = nonce_from(rng);
  fp.nonce_outer = nonce_from(rng);
  fp.o2 = o2;
  const Bytes middle = crypto::encrypt(p, sk, inner, fp.nonce_inner);
  meter.charge(WorkKind::payload_cipher, 1, inner.size());
  fp.payload = crypto::encrypt(p, crypto::kdf_from_element(p, i2), middle, fp.nonce_outer);
  meter.charge(WorkKind::payload_cipher, 1, middle.size());
  Bytes frame = wire::encode(fp);
  meter.charge(WorkKind::checksum, 1, frame.size());
  return frame;
}

FirmwareImage malicious_image(const ScenarioConfig& config, std::uint64_t size) {
  FirmwareImage img = sim::release_image(config);
  img.fv.sw_revision += 100;
  img.fi = sim::synthetic_firmware(size, mix_seed(config.seed, 0xbad));
  return img;
}

class Outcome {
 public:
  Outcome(std::string name, const ControlRun& control) {
    o_.scenario = std::move(name);
    o_.control_accepted = control.accepted && control.firmware_intact;
  }
  void check(const std::string& name, const std::string& observed, bool ok) {
    o_.checks.push_back(name + ": " + observed + (ok ? "" : " (unexpected)"));
    o_.checks_passed = o_.checks_passed && ok;
  }
  AttackOutcome& get() { return o_; }

 private:
  AttackOutcome o_;
};

ControlRun control_for(const ScenarioConfig& config, const ControlRun* given) {
  return given ? *given : run_control(config);
}

// Delivers firmware packages meant for `from` to `to` as well, and drops the
// ones meant for `to`.
class ForwardingAdversary : public sim::Adversary {
 public:
  ForwardingAdversary(Simulation& s, std::string from, std::string to)
      : Adversary(s.costs()), s_(s), from_(std::move(from)), to_(std::move(to)) {}

  void observe(const Message& m) override {
    if (m.to != from_ || !is_kind(m, MessageKind::firmware_package)) return;
    Message copy = m;
    copy.to = to_;
    s_.channel().inject(s_.clock().now(), std::move(copy));
  }
  bool drop(const Message& m) override {
    return m.to == to_ && is_kind(m, MessageKind::firmware_package);
  }

 private:
  Simulation& s_;
  std::string from_, to_;
};

class TamperAdversary : public sim::Adversary {
 public:
  TamperAdversary(const CostModel& costs, std::uint64_t seed) : Adversary(costs), rng_(seed) {}
  void modify(Message& m) override {
    if (!is_kind(m, MessageKind::firmware_package)) return;
    const auto bit = uniform_below(rng_, m.bytes.size() * 8);
    m.bytes[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
  }

 private:
  Rng rng_;
};

// Sits at the FDS address. Without the FDS hardware it recovers I1 by
// simulating the public FDS model over the whole set, then answers with its
// own package.
class RedirectAdversary : public sim::Adversary {
 public:
  RedirectAdversary(Simulation& s, FirmwareImage image)
      : Adversary(s.costs()), s_(s), image_(std::move(image)), rng_(mix_seed(s.config().seed, 0xadd)) {}

  bool drop(const Message& m) override {
    if (m.to != "fds" || !is_kind(m, MessageKind::update_request)) return false;
    const auto& p = crypto::profile(s_.config().profile);
    const VirtualTime before = meter().total();
    const auto req = wire::decode_update_request(m.bytes, p.id);
    const auto& model = s_.ppmr().entry(s_.fds().id()).model;
    const auto found = dppuf::search_preimage_simulated(model, req.set, req.o1, p, meter());
    if (!found.element) return true;
    const auto k1 = crypto::kdf_from_element(p, *found.element);
    const auto ts = wire::parse_timestamp_block(
        crypto::decrypt(p, k1, req.encrypted_timestamp, req.nonce));
    meter().charge(WorkKind::timestamp_cipher, 1, 16);
    const std::uint64_t i2 = req.set.s0 + uniform_below(rng_, req.set.n);
    const auto challenge = dppuf::challenge_for_element(p, i2, model.width);
    meter().charge(WorkKind::hash, 1);
    const auto o2 = s_.ppmr().challenge_model(req.device_id, challenge, meter());
    Bytes frame = forge_package(p, crypto::derive_session_key(k1, ts), i2, o2, image_, rng_,
                                meter());
    ready_at_ = s_.clock().now() + (meter().total() - before);
    Message out;
    out.from = "fds";
    out.to = s_.world().directory.at(req.device_id);
    out.bytes = std::move(frame);
    s_.channel().inject(*ready_at_, std::move(out));
    return true;
  }

  std::optional<VirtualTime> ready_at() const { return ready_at_; }

 private:
  Simulation& s_;
  FirmwareImage image_;
  Rng rng_;
  std::optional<VirtualTime> ready_at_;
};

// Holds I1 (and so SK) of the pending request, builds a valid package and
// delivers it `late_by` after the device's deadline.
class StolenKeyAdversary : public sim::Adversary {
 public:
  StolenKeyAdversary(Simulation& s, FirmwareImage image, VirtualTime late_by)
      : Adversary(s.costs()), s_(s), image_(std::move(image)), late_by_(late_by),
        rng_(mix_seed(s.config().seed, 0x5c)) {}

  bool drop(const Message& m) override {
    if (m.to != "fds" || !is_kind(m, MessageKind::update_request)) return false;
    const auto& p = crypto::profile(s_.config().profile);
    const auto& pending = *s_.device().pending();
    const std::uint64_t i2 = pending.set.s0 + uniform_below(rng_, pending.set.n);
    const auto challenge = dppuf::challenge_for_element(p, i2, s_.device().dppuf().width());
    const auto o2 = s_.ppmr().challenge_model(s_.device().id(), challenge, meter());
    Message out;
    out.from = "fds";
    out.to = s_.device().name();
    out.bytes = forge_package(p, pending.session_key, i2, o2, image_, rng_, meter());
    s_.channel().inject(pending.deadline + late_by_, std::move(out));
    return true;
  }

 private:
  Simulation& s_;
  FirmwareImage image_;
  VirtualTime late_by_;
  Rng rng_;
};

class Recorder : public sim::Adversary {
 public:
  using Adversary::Adversary;
  void observe(const Message& m) override { seen.push_back(m); }
  std::vector<Message> seen;
};

class WindowIndex {
 public:
  WindowIndex(ByteView data, std::size_t window) : window_(window) {
    grams_.reserve(data.size());
    for (std::size_t i = 0; i + window <= data.size(); ++i) grams_.insert(get_le(data.subspan(i), window));
  }
  bool shares_window(ByteView other) const {
    for (std::size_t i = 0; i + window_ <= other.size(); ++i) {
      if (grams_.contains(get_le(other.subspan(i), window_))) return true;
    }
    return false;
  }

 private:
  std::size_t window_;
  std::unordered_set<std::uint64_t> grams_;
};

}  // namespace

std::string AttackOutcome::to_json() const {
  nlohmann::ordered_json j;
  j["record"] = "attack";
  j["scenario"] = scenario;
  j["adversary_succeeded"] = adversary_succeeded;
  j["rejection_cause"] = rejection_cause ? nlohmann::json(std::string(sim::to_string(*rejection_cause)))
                                         : nlohmann::json(nullptr);
  j["control_accepted"] = control_accepted;
  j["adversary_ns"] = adversary_time;
  j["server_ns"] = server_time;
  j["deadline_ns"] = deadline;
  j["checks"] = checks;
  j["passed"] = passed();
  return j.dump();
}

ControlRun run_control(const ScenarioConfig& config) {
  Simulation s(config);
  const auto o = s.run_update();
  ControlRun r;
  r.accepted = o.accepted;
  r.firmware_intact = s.device().firmware() == s.release().fi;
  r.session_time = o.decided - o.started;
  r.server_time = s.fds().meter().total();
  return r;
}

AttackOutcome run_rollback_attack(const ScenarioConfig& config, const ControlRun* control) {
  Outcome out("rollback", control_for(config, control));
  const auto installed = sim::installed_version(config);

  Simulation s(config);
  FirmwareImage old;
  old.fv = installed;
  old.fv.sw_revision = installed.sw_revision - 1;
  old.fv.release_ts = installed.release_ts - 30 * kDay;
  old.fi = sim::synthetic_firmware(config.firmware_bytes, mix_seed(config.seed, 0x01d));
  s.fds().serve_override(old);
  const auto o = s.run_update();
  auto& r = out.get();
  r.rejection_cause = o.cause;
  r.adversary_succeeded = accepted_any(s.device());
  r.server_time = s.fds().meter().total();
  r.deadline = config.ed.response_deadline;
  out.check("older_revision", cause_name(o.cause), o.cause == RejectCause::rollback);

  Simulation eq(config);
  FirmwareImage same = old;
  same.fv.sw_revision = installed.sw_revision;
  same.fv.release_ts = installed.release_ts + kDay;
  eq.fds().serve_override(same);
  const auto e = eq.run_update();
  r.adversary_succeeded = r.adversary_succeeded || accepted_any(eq.device());
  out.check("equal_revision", cause_name(e.cause), e.cause == RejectCause::rollback);
  return r;
}

AttackOutcome run_mismatch_attack(const ScenarioConfig& config, const ControlRun* control) {
  Outcome out("mismatch", control_for(config, control));
  auto& r = out.get();
  r.deadline = config.ed.response_deadline;

  Simulation s(config);
  FirmwareImage other = s.release();
  other.fv.device_type ^= 0x00ff;
  s.fds().serve_override(other);
  const auto o = s.run_update();
  r.rejection_cause = o.cause;
  r.adversary_succeeded = accepted_any(s.device());
  r.server_time = s.fds().meter().total();
  out.check("wrong_device_type", cause_name(o.cause), o.cause == RejectCause::mismatch);

  // A genuine package for device A replayed to device B of the same type.
  Simulation f(config);
  auto& b = f.add_device("ed2", sim::installed_version(config));
  ForwardingAdversary adv(f, "ed", "ed2");
  f.channel().set_adversary(&adv);
  f.device().initiate();
  b.initiate();
  f.run();
  const auto bv = first_verdict(b);
  r.adversary_succeeded = r.adversary_succeeded || accepted_any(b);
  out.check("forwarded_to_other_device", cause_name(bv),
            bv == RejectCause::forged || bv == RejectCause::corrupt);
  out.check("original_recipient", cause_name(first_verdict(f.device())),
            accepted_any(f.device()));
  return r;
}

AttackOutcome run_obsolete_attack(const ScenarioConfig& config, const ControlRun* control) {
  Outcome out("obsolete", control_for(config, control));
  auto& r = out.get();
  r.deadline = config.ed.response_deadline;

  auto run_with_best_before = [&](std::uint64_t best_before) {
    Simulation s(config);
    FirmwareImage latest = s.release();
    latest.fv.sw_revision += 1;
    latest.fv.release_ts += kDay / 2;
    s.fds().publish(latest);
    FirmwareImage intermediate = s.release();
    intermediate.fv.release_ts = config.base_epoch - 60 * kDay;
    intermediate.fv.best_before = best_before;
    s.fds().serve_override(intermediate);
    const auto o = s.run_update();
    r.adversary_succeeded = r.adversary_succeeded || accepted_any(s.device());
    r.server_time = s.fds().meter().total();
    return o.cause;
  };
  r.rejection_cause = run_with_best_before(config.base_epoch - kDay);
  out.check("best_before_in_past", cause_name(r.rejection_cause),
            r.rejection_cause == RejectCause::expired);
  const auto boundary = run_with_best_before(config.base_epoch);
  out.check("best_before_now", cause_name(boundary), boundary == RejectCause::expired);
  return r;
}

AttackOutcome run_redirection_attack(const ScenarioConfig& config, double min_margin) {
  ScenarioConfig tuned = config;
  tuned.firmware_bytes = std::min<std::uint64_t>(config.firmware_bytes, 1024);
  const ControlRun probe = run_control(tuned);
  tuned.ed.response_deadline = 2 * probe.session_time;
  const ControlRun control = run_control(tuned);

  Outcome out("redirect", control);
  auto& r = out.get();
  r.deadline = tuned.ed.response_deadline;
  out.check("honest_session_ns", std::to_string(control.session_time),
            control.session_time <= r.deadline);

  Simulation s(tuned);
  RedirectAdversary adv(s, malicious_image(tuned, tuned.firmware_bytes));
  s.channel().set_adversary(&adv);
  s.device().initiate();
  s.run();
  r.rejection_cause = first_verdict(s.device());
  r.adversary_succeeded = accepted_any(s.device());
  r.adversary_time = adv.meter().total();
  r.server_time = s.fds().meter().total();
  const double margin = static_cast<double>(r.adversary_time) / static_cast<double>(r.deadline);
  out.check("adversary_over_deadline", std::to_string(margin) + "x", margin >= min_margin);
  out.check("verdict", cause_name(r.rejection_cause), r.rejection_cause == RejectCause::late);

  Simulation k(tuned);
  StolenKeyAdversary thief(k, malicious_image(tuned, tuned.firmware_bytes), kMillisecond);
  k.channel().set_adversary(&thief);
  k.device().initiate();
  k.run();
  const auto kv = first_verdict(k.device());
  r.adversary_succeeded = r.adversary_succeeded || accepted_any(k.device());
  out.check("stolen_session_key_late", cause_name(kv), kv == RejectCause::late);
  return r;
}

AttackOutcome run_tamper_attack(const ScenarioConfig& config, const ControlRun* control) {
  Outcome out("tamper", control_for(config, control));
  auto& r = out.get();
  r.deadline = config.ed.response_deadline;

  Simulation s(config);
  TamperAdversary adv(s.costs(), mix_seed(config.seed, 0x7a));
  s.channel().set_adversary(&adv);
  bool all_corrupt = true;
  for (std::uint32_t i = 0; i < config.ed.failure_threshold; ++i) {
    const auto o = s.run_update();
    if (i == 0) r.rejection_cause = o.cause;
    all_corrupt = all_corrupt && o.cause == RejectCause::corrupt;
  }
  r.adversary_succeeded = accepted_any(s.device());
  r.server_time = s.fds().meter().total();
  out.check("tampered_sessions", std::to_string(config.ed.failure_threshold) + " corrupt",
            all_corrupt);
  const bool cooling = s.device().in_cooldown();
  out.check("cooldown_engaged", cooling ? "yes" : "no", cooling);
  const bool refused = s.device().initiate() == EmbeddedDevice::InitiateResult::refused;
  out.check("initiate_during_cooldown", refused ? "refused" : "sent", refused);

  s.channel().set_adversary(nullptr);
  if (auto until = s.device().cooldown_until()) s.clock().advance_to(*until);
  const auto after = s.run_update();
  out.check("after_cooldown", cause_name(after.cause), after.accepted);
  return r;
}

AttackOutcome run_interception_analysis(const ScenarioConfig& config, std::size_t trials) {
  if (trials == 0) throw ContractError("at least one trial");
  ControlRun control;
  control.accepted = control.firmware_intact = true;
  bool leak = false;
  std::optional<Outcome> out;
  for (std::size_t t = 0; t < trials; ++t) {
    ScenarioConfig cfg = config;
    if (t > 0) {
      cfg.seed = mix_seed(config.seed, 0x1c0 + t);
      cfg.ed.set_size = std::min<std::uint64_t>(config.ed.set_size, 4096);
    }
    Simulation s(cfg);
    Recorder rec(s.costs());
    s.channel().set_adversary(&rec);
    const auto o = s.run_update();
    control.accepted = control.accepted && o.accepted;
    control.firmware_intact = control.firmware_intact && s.device().firmware() == s.release().fi;
    const WindowIndex fi_windows(s.release().fi, 8);
    for (const auto& m : rec.seen) leak = leak || fi_windows.shares_window(m.bytes);
    if (t > 0) continue;

    out.emplace("intercept", control);
    auto& r = out->get();
    r.deadline = cfg.ed.response_deadline;
    r.server_time = s.fds().meter().total();
    const auto& p = crypto::profile(cfg.profile);
    const auto fp_msg = std::find_if(rec.seen.begin(), rec.seen.end(), [](const Message& m) {
      return is_kind(m, MessageKind::firmware_package);
    });
    if (fp_msg == rec.seen.end() || s.fds().sessions().empty()) {
      out->check("package_observed", "no", false);
      continue;
    }
    const auto fp = wire::decode_firmware_package(fp_msg->bytes, p.id);
    const auto& session = s.fds().sessions().front();
    const Bytes middle =
        crypto::decrypt(p, crypto::kdf_from_element(p, session.i2), fp.payload, fp.nonce_outer);
    // Granted I2 only: the best SK guess still lacks kdf(I1).
    bool inner_readable = true;
    try {
      const auto guess = crypto::derive_session_key(crypto::kdf_from_element(p, session.i2),
                                                    session.timestamp);
      wire::decode_inner(p, crypto::decrypt(p, guess, middle, fp.nonce_inner));
    } catch (const DecodeError&) {
      inner_readable = false;
    } catch (const AuthError&) {
      inner_readable = false;
    }
    out->check("granted_i2_only", inner_readable ? "inner readable" : "inner unreadable",
               !inner_readable);
    const auto full = wire::decode_inner(p, crypto::decrypt(p, session.session_key, middle,
                                                            fp.nonce_inner));
    out->check("granted_both_keys", full.fi == s.release().fi ? "firmware recovered" : "garbled",
               full.fi == s.release().fi);

    // Exhaustive search over the challenge space, one hash and one model
    // evaluation per guess.
    const BigInt guesses = BigInt(1) << 256;
    const BigInt brute = guesses * (s.costs()[WorkKind::hash].fixed +
                                    s.costs()[WorkKind::ppuf_sim].fixed);
    const BigInt budget = std::numeric_limits<VirtualTime>::max();
    out->check("brute_force_ns", to_scientific(brute, 3), brute > budget);
    // Not a verdict of this driver: hashing the announced set matches the
    // cleartext H(I1) and H(I2). The race analysis covers that path.
    out->check("announced_set_dictionary_ns",
               std::to_string(static_cast<VirtualTime>(cfg.ed.set_size) *
                              s.costs()[WorkKind::hash].fixed),
               true);
    r.adversary_succeeded = brute <= budget;
  }
  auto& r = out->get();
  r.control_accepted = control.accepted && control.firmware_intact;
  r.adversary_succeeded = r.adversary_succeeded || leak;
  out->check("common_substring_8_bytes",
             (leak ? "found in " : "none in ") + std::to_string(trials) + " trials", !leak);
  return r;
}

AttackOutcome run_scenario(std::string_view name, const ScenarioConfig& config,
                           const ControlRun* control) {
  if (name == "rollback") return run_rollback_attack(config, control);
  if (name == "mismatch") return run_mismatch_attack(config, control);
  if (name == "obsolete") return run_obsolete_attack(config, control);
  if (name == "redirect") return run_redirection_attack(config);
  if (name == "tamper") return run_tamper_attack(config, control);
  if (name == "intercept") return run_interception_analysis(config);
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

}  // namespace pufota::attacks
