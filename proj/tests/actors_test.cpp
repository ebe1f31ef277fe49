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

#include <gtest/gtest.h>

#include <functional>

#include "pufota/error.hpp"
#include "pufota/sim/scenario.hpp"

namespace pufota::sim {
namespace {

using crypto::ProfileId;

ScenarioConfig small(ProfileId profile = ProfileId::lightweight, std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.profile = profile;
  c.seed = seed;
  c.ed.set_size = 1000;
  c.firmware_bytes = 4096;
  return c;
}

// Hooks as lambdas; defaults pass everything through.
class ScriptedAdversary : public Adversary {
 public:
  explicit ScriptedAdversary(const CostModel& costs) : Adversary(costs) {}
  std::function<void(const Message&)> on_observe;
  std::function<bool(const Message&)> on_drop;
  std::function<void(Message&)> on_modify;
  std::function<VirtualTime(const Message&)> on_delay;

  void observe(const Message& m) override {
    if (on_observe) on_observe(m);
  }
  bool drop(const Message& m) override { return on_drop && on_drop(m); }
  void modify(Message& m) override {
    if (on_modify) on_modify(m);
  }
  VirtualTime delay(const Message& m) override { return on_delay ? on_delay(m) : 0; }
};

bool is_package(const Message& m) { return m.from == "fds" && m.to == "ed"; }

// Rewrites the package on its way to the ED and reseals the checksum.
std::function<void(Message&)> rewrite_package(ProfileId profile,
                                              std::function<void(wire::FirmwarePackage&)> f) {
  return [profile, f](Message& m) {
    if (!is_package(m)) return;
    auto fp = wire::decode_firmware_package(m.bytes, profile);
    f(fp);
    m.bytes = wire::encode(fp);
  };
}

TEST(Actors, HonestUpdateAcceptedForEveryProfile) {
  for (auto id : crypto::kAllProfiles) {
    for (std::uint64_t size : {0u, 1u, 1183u * 1024u}) {
      ScenarioConfig c = small(id);
      c.firmware_bytes = size;
      Simulation sim(c);
      auto& ed = sim.device();
      ASSERT_EQ(ed.initiate(), EmbeddedDevice::InitiateResult::sent);
      const PendingRequest pending = *ed.pending();
      sim.run();
      ASSERT_EQ(ed.outcomes().size(), 1u);
      const auto& o = ed.outcomes().back();
      EXPECT_TRUE(o.accepted) << crypto::profile(id).name << " " << size;
      EXPECT_EQ(ed.firmware(), sim.release().fi);
      EXPECT_EQ(ed.installed(), sim.release().fv);
      EXPECT_FALSE(ed.pending().has_value());
      ASSERT_EQ(sim.fds().sessions().size(), 1u);
      const auto& s = sim.fds().sessions()[0];
      EXPECT_EQ(s.i1, pending.i1);
      EXPECT_EQ(s.timestamp, pending.timestamp);
      EXPECT_EQ(s.session_key, pending.session_key);
      EXPECT_TRUE(pending.set.contains(s.i2));
      EXPECT_LE(o.decided, pending.deadline);
    }
  }
}

TEST(Actors, ReplayAfterAcceptHasNoPending) {
  Simulation sim(small());
  ScriptedAdversary adv(sim.costs());
  std::optional<Message> recorded;
  adv.on_observe = [&](const Message& m) {
    if (is_package(m)) recorded = m;
  };
  sim.channel().set_adversary(&adv);
  ASSERT_TRUE(sim.run_update().accepted);
  ASSERT_TRUE(recorded);
  const auto installed = sim.device().installed();
  sim.channel().inject(sim.clock().now() + kSecond, *recorded);
  sim.run();
  const auto& o = sim.device().outcomes().back();
  EXPECT_FALSE(o.accepted);
  EXPECT_EQ(o.cause, RejectCause::no_pending);
  EXPECT_EQ(sim.device().installed(), installed);
}

TEST(Actors, DelayedPackageIsLate) {
  Simulation sim(small());
  ScriptedAdversary adv(sim.costs());
  adv.on_delay = [](const Message& m) { return is_package(m) ? 3 * kSecond : 0; };
  sim.channel().set_adversary(&adv);
  sim.run_update();
  EXPECT_EQ(sim.device().outcomes().front().cause, RejectCause::late);
  // The deadline timer fires first; the package itself then finds nothing
  // pending.
  EXPECT_EQ(sim.device().outcomes().back().cause, RejectCause::no_pending);
  EXPECT_EQ(sim.device().outcomes().size(), 2u);
  EXPECT_EQ(sim.device().installed(), installed_version(sim.config()));
}

TEST(Actors, DroppedPackageIsLate) {
  Simulation sim(small());
  ScriptedAdversary adv(sim.costs());
  adv.on_drop = is_package;
  sim.channel().set_adversary(&adv);
  const auto o = sim.run_update();
  EXPECT_EQ(o.cause, RejectCause::late);
  EXPECT_EQ(o.decided, sim.device().config().response_deadline + 1);
  EXPECT_EQ(sim.channel().dropped(), 1u);
}

TEST(Actors, DoubleInitiateIsContractError) {
  Simulation sim(small());
  sim.device().initiate();
  EXPECT_THROW(sim.device().initiate(), ContractError);
}

TEST(Actors, DeterministicUnderSeed) {
  auto run = [](std::uint64_t seed) {
    Simulation sim(small(ProfileId::midweight, seed));
    ScriptedAdversary adv(sim.costs());
    std::vector<Bytes> frames;
    adv.on_observe = [&](const Message& m) { frames.push_back(m.bytes); };
    sim.channel().set_adversary(&adv);
    sim.run_update();
    return std::make_pair(sim.trace().records(), frames);
  };
  const auto a = run(7);
  const auto b = run(7);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_NE(run(8).second, a.second);
}

TEST(Actors, CooldownAfterThreeQuickFailures) {
  Simulation sim(small());
  ScriptedAdversary adv(sim.costs());
  adv.on_drop = is_package;
  sim.channel().set_adversary(&adv);
  auto& ed = sim.device();
  for (int i = 0; i < 3; ++i) EXPECT_EQ(sim.run_update().cause, RejectCause::late);
  ASSERT_TRUE(ed.cooldown_until().has_value());
  EXPECT_LE(sim.clock().now(), 10 * kSecond);
  EXPECT_TRUE(ed.in_cooldown());
  EXPECT_EQ(*ed.cooldown_until(), sim.clock().now() + ed.config().cooldown_duration);

  // Refused while cooling down; a refusal is not a logged failure.
  EXPECT_EQ(ed.initiate(), EmbeddedDevice::InitiateResult::refused);
  EXPECT_EQ(sim.run_update().cause, RejectCause::cooldown);
  EXPECT_TRUE(ed.failures().empty());

  // After expiry the next initiation goes through and an honest run succeeds.
  sim.channel().set_adversary(nullptr);
  sim.clock().advance_to(*ed.cooldown_until());
  EXPECT_FALSE(ed.in_cooldown());
  EXPECT_TRUE(sim.run_update().accepted);
}

TEST(Actors, FailuresOutsideWindowDoNotTrip) {
  Simulation sim(small());
  ScriptedAdversary adv(sim.costs());
  adv.on_drop = is_package;
  sim.channel().set_adversary(&adv);
  auto& ed = sim.device();
  sim.run_update();
  sim.run_update();
  sim.clock().advance(61 * kSecond);
  sim.run_update();
  EXPECT_FALSE(ed.cooldown_until().has_value());
  EXPECT_EQ(ed.failures().size(), 1u);
  sim.run_update();
  sim.run_update();
  EXPECT_TRUE(ed.cooldown_until().has_value());
}

TEST(Actors, PackageDuringCooldownIsRejectedWithoutLogging) {
  Simulation sim(small());
  ScriptedAdversary adv(sim.costs());
  std::optional<Message> recorded;
  adv.on_observe = [&](const Message& m) {
    if (is_package(m)) recorded = m;
  };
  adv.on_drop = is_package;
  sim.channel().set_adversary(&adv);
  for (int i = 0; i < 3; ++i) sim.run_update();
  ASSERT_TRUE(sim.device().in_cooldown());
  sim.channel().set_adversary(nullptr);
  sim.channel().inject(sim.clock().now() + 1, *recorded);
  sim.run();
  EXPECT_EQ(sim.device().outcomes().back().cause, RejectCause::cooldown);
  EXPECT_TRUE(sim.device().failures().empty());
}

// ---------------------------------------------------------------------------
// Rejection causes and their order. Each case stacks a fault on top of one
// that the device should only see later.

struct Case {
  const char* name;
  RejectCause expected;
  std::function<void(Simulation&, ScriptedAdversary&)> setup;
};

FirmwareImage with_fv(const Simulation& sim, std::function<void(wire::FirmwareVersion&)> f) {
  FirmwareImage img = sim.release();
  f(img.fv);
  return img;
}

const std::uint64_t kDay = 86'400;

std::vector<Case> ordering_cases() {
  const ProfileId p = ProfileId::lightweight;
  return {
      {"late beats corrupt", RejectCause::late,
       [](Simulation&, ScriptedAdversary& a) {
         a.on_delay = [](const Message& m) { return is_package(m) ? 5 * kSecond : 0; };
         a.on_modify = [](Message& m) {
           if (is_package(m)) m.bytes[40] ^= 1;
         };
       }},
      {"corrupt beats forged", RejectCause::corrupt,
       [](Simulation&, ScriptedAdversary& a) {
         // o2 bit flipped without resealing
         a.on_modify = [](Message& m) {
           if (is_package(m)) m.bytes[wire::kHeaderSize + 24 + 2] ^= 0x80;
         };
       }},
      {"forged beats undecryptable", RejectCause::forged,
       [p](Simulation&, ScriptedAdversary& a) {
         a.on_modify = rewrite_package(p, [](wire::FirmwarePackage& fp) {
           fp.o2 = ~fp.o2;
           fp.payload[0] ^= 1;
         });
       }},
      {"undecryptable beats mismatch", RejectCause::undecryptable,
       [p](Simulation& sim, ScriptedAdversary& a) {
         sim.fds().serve_override(with_fv(sim, [](auto& fv) { fv.device_type ^= 0xff; }));
         a.on_modify = rewrite_package(p, [](wire::FirmwarePackage& fp) { fp.payload[3] ^= 1; });
       }},
      {"wrong i2 is undecryptable", RejectCause::undecryptable,
       [p](Simulation& sim, ScriptedAdversary& a) {
         // o2 answered for a different element of the same set
         a.on_modify = rewrite_package(p, [&sim](wire::FirmwarePackage& fp) {
           const auto& ed = sim.device();
           const SetDescriptor set = ed.pending()->set;
           for (std::uint64_t e = set.s0;; ++e) {
             const auto r = ed.dppuf().evaluate(
                 dppuf::challenge_for_element(crypto::profile(ProfileId::lightweight), e, 256));
             if (r != fp.o2) {
               fp.o2 = r;
               break;
             }
           }
         });
       }},
      {"mismatch beats expired", RejectCause::mismatch,
       [](Simulation& sim, ScriptedAdversary&) {
         const auto base = sim.config().base_epoch;
         sim.fds().serve_override(with_fv(sim, [base](auto& fv) {
           fv.hw_revision += 1;
           fv.release_ts = base - 10 * kDay;
           fv.best_before = base - kDay;
         }));
       }},
      {"expired beats rollback", RejectCause::expired,
       [](Simulation& sim, ScriptedAdversary&) {
         const auto base = sim.config().base_epoch;
         sim.fds().serve_override(with_fv(sim, [base](auto& fv) {
           fv.sw_revision = 0;
           fv.release_ts = base - 400 * kDay;
           fv.best_before = base - kDay;
         }));
       }},
      {"best_before equal to now is expired", RejectCause::expired,
       [](Simulation& sim, ScriptedAdversary&) {
         const auto base = sim.config().base_epoch;
         sim.fds().serve_override(with_fv(sim, [base](auto& fv) { fv.best_before = base; }));
       }},
      {"older release", RejectCause::rollback,
       [](Simulation& sim, ScriptedAdversary&) {
         sim.fds().serve_override(
             with_fv(sim, [&sim](auto& fv) { fv.release_ts = installed_version(sim.config()).release_ts - 1; }));
       }},
      {"same revision", RejectCause::rollback,
       [](Simulation& sim, ScriptedAdversary&) {
         sim.fds().serve_override(with_fv(sim, [](auto& fv) { fv.sw_revision = 1; }));
       }},
  };
}

TEST(Actors, RejectionOrder) {
  for (const auto& c : ordering_cases()) {
    Simulation sim(small());
    ScriptedAdversary adv(sim.costs());
    sim.channel().set_adversary(&adv);
    c.setup(sim, adv);
    sim.run_update();
    const auto& o = sim.device().outcomes().front();
    EXPECT_FALSE(o.accepted) << c.name;
    EXPECT_EQ(o.cause, c.expected) << c.name << ": got "
                                   << (o.cause ? to_string(*o.cause) : "accept");
    EXPECT_EQ(sim.device().installed(), installed_version(sim.config())) << c.name;
    EXPECT_FALSE(sim.device().failures().empty()) << c.name;
  }
}

TEST(Actors, NonPackageMessageCountsAsCorrupt) {
  Simulation sim(small());
  ScriptedAdversary adv(sim.costs());
  adv.on_modify = [](Message& m) {
    if (is_package(m)) m.bytes[5] = static_cast<std::uint8_t>(wire::MessageKind::model_query);
  };
  sim.channel().set_adversary(&adv);
  EXPECT_EQ(sim.run_update().cause, RejectCause::corrupt);
}

// Random interleavings of honest runs, replays of old packages, drops and
// stale releases: the installed release time never goes backwards.
TEST(Actors, ReleaseTimeNeverDecreases) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    ScenarioConfig c = small(ProfileId::lightweight, seed);
    c.ed.failure_threshold = 1000;
    Simulation sim(c);
    ScriptedAdversary adv(sim.costs());
    std::vector<Message> seen;
    adv.on_observe = [&](const Message& m) {
      if (is_package(m)) seen.push_back(m);
    };
    int mode = 0;
    adv.on_drop = [&](const Message& m) { return mode == 1 && is_package(m); };
    sim.channel().set_adversary(&adv);
    Rng rng(seed);
    std::uint32_t sw = 2;
    std::uint64_t last = sim.device().installed().release_ts;
    for (int step = 0; step < 16; ++step) {
      mode = static_cast<int>(uniform_below(rng, 4));
      if (mode == 2 && !seen.empty()) {
        sim.device().initiate();
        sim.channel().inject(sim.clock().now() + 1, seen[uniform_below(rng, seen.size())]);
        sim.run();
      } else if (mode == 3) {
        FirmwareImage img = sim.release();
        img.fv.sw_revision = ++sw;
        img.fv.release_ts = sim.config().base_epoch - uniform_below(rng, 200) * kDay;
        img.fv.best_before = sim.config().base_epoch + 400 * kDay;
        sim.fds().publish(img);
        sim.run_update();
      } else {
        sim.run_update();
      }
      const std::uint64_t now = sim.device().installed().release_ts;
      ASSERT_GE(now, last) << "seed " << seed << " step " << step;
      last = now;
      ASSERT_FALSE(sim.device().pending() && sim.device().pending()->answered &&
                   sim.clock().pending() == 0);
    }
  }
}

TEST(Actors, FdsDropsImplausibleTimestamp) {
  Simulation sim(small());
  ScriptedAdversary adv(sim.costs());
  auto& ed = sim.device();
  const auto& prof = crypto::profile(ProfileId::lightweight);
  adv.on_modify = [&](Message& m) {
    if (m.from != "ed") return;
    auto relay = wire::decode_relay_request(m.bytes, prof.id);
    const auto k1 = crypto::kdf_from_element(prof, ed.pending()->i1);
    relay.request.encrypted_timestamp =
        crypto::encrypt(prof, k1, wire::timestamp_block(0), relay.request.nonce);
    m.bytes = wire::encode(relay);
  };
  sim.channel().set_adversary(&adv);
  const auto o = sim.run_update();
  EXPECT_EQ(o.cause, RejectCause::late);
  EXPECT_EQ(sim.trace().count("fds", "drop_request"), 1u);
  EXPECT_TRUE(sim.fds().sessions().empty());
  bool found = false;
  for (const auto& r : sim.trace().records()) {
    found |= r.actor == "fds" && r.cause == "implausible_timestamp";
  }
  EXPECT_TRUE(found);
}

TEST(Actors, FdsDropsCorruptedO1) {
  Simulation sim(small());
  ScriptedAdversary adv(sim.costs());
  adv.on_modify = [](Message& m) {
    if (m.from != "ppmr" || m.to != "fds") return;
    if (wire::peek_kind(m.bytes) != wire::MessageKind::update_request) return;
    auto req = wire::decode_update_request(m.bytes, ProfileId::lightweight);
    req.o1.flip(17);
    m.bytes = wire::encode(req);
  };
  sim.channel().set_adversary(&adv);
  EXPECT_EQ(sim.run_update().cause, RejectCause::late);
  bool found = false;
  for (const auto& r : sim.trace().records()) {
    found |= r.actor == "fds" && r.event == "drop_request" && r.cause == "forged";
  }
  EXPECT_TRUE(found);
}

TEST(Actors, FdsWithoutFirmwareDrops) {
  Simulation sim(small());
  sim.fds().clear_repository();
  EXPECT_EQ(sim.run_update().cause, RejectCause::late);
  bool found = false;
  for (const auto& r : sim.trace().records()) found |= r.cause == "no_firmware";
  EXPECT_TRUE(found);
}

TEST(Actors, NoisyResponsesStillAccepted) {
  ScenarioConfig c = small(ProfileId::heavyweight);
  c.ed.noise_flips = 6;
  c.fds.noise_flips = 6;
  c.ed.set_size = 200;
  Simulation sim(c);
  const auto o = sim.run_update();
  EXPECT_TRUE(o.accepted) << (o.cause ? to_string(*o.cause) : "");
  EXPECT_EQ(sim.device().firmware(), sim.release().fi);
}

TEST(Actors, PublishRules) {
  Simulation sim(small());
  FirmwareImage img = sim.release();
  EXPECT_THROW(sim.fds().publish(img), ConfigError);  // same sw
  img.fv.sw_revision = 9;
  img.fv.best_before = img.fv.release_ts;
  EXPECT_THROW(sim.fds().publish(img), ConfigError);
  img.fv.best_before = img.fv.release_ts + 1;
  sim.fds().publish(img);
  EXPECT_EQ(sim.fds().latest(img.fv.key())->fv.sw_revision, 9u);
}

TEST(Ppmr, ModelQueriesAndRegistration) {
  Simulation sim(small());
  auto& ppmr = sim.ppmr();
  const auto& ed = sim.device();
  Meter requester(sim.costs());
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto c = BitString::from_bytes(random_bytes(rng, 32), 256);
    ASSERT_EQ(ppmr.challenge_model(ed.id(), c, requester), ed.dppuf().evaluate(c));
  }
  EXPECT_EQ(requester.count(WorkKind::ppuf_sim), 200u);
  EXPECT_EQ(requester.total(), 200 * sim.costs().cost(WorkKind::ppuf_sim));

  InstanceId unknown{};
  unknown[0] = 0xee;
  EXPECT_THROW(ppmr.entry(unknown), LookupError);
  EXPECT_THROW(ppmr.challenge_model(unknown, BitString(256), requester), LookupError);
  EXPECT_THROW(ppmr.register_model(ppmr.entry(ed.id()).model), ConfigError);
}

// Virtual cost of sequential pings is linear in their count.
TEST(Ppmr, PingCostLinear) {
  Simulation sim(small());
  Meter m(sim.costs());
  const auto c = BitString(256);
  for (int i = 0; i < 10'000; ++i) sim.ppmr().challenge_model(sim.device().id(), c, m);
  EXPECT_EQ(m.total(), 10'000 * sim.costs().cost(WorkKind::ppuf_sim));
  EXPECT_EQ(sim.costs().cost(WorkKind::ppuf_sim),
            1000 * (sim.costs().cost(WorkKind::hash) + sim.costs().cost(WorkKind::ppuf_hw)));
}

TEST(Actors, PhaseTimesAddUp) {
  Simulation sim(small(ProfileId::heavyweight));
  ASSERT_TRUE(sim.run_update().accepted);
  const PhaseTimes t = phase_times(sim.trace());
  EXPECT_GT(t.search, 0);
  EXPECT_EQ(t.request + t.search + t.package + t.transfer + t.unpack, t.total);
  EXPECT_EQ(t.total, sim.device().outcomes().back().decided);
}

TEST(Actors, MultipleDevicesShareTheServer) {
  Simulation sim(small());
  auto& ed2 = sim.add_device("ed2", installed_version(sim.config()));
  EXPECT_TRUE(sim.run_update().accepted);
  EXPECT_TRUE(sim.run_update(ed2).accepted);
  EXPECT_EQ(ed2.firmware(), sim.release().fi);
  EXPECT_NE(ed2.id(), sim.device().id());
}

TEST(Actors, ConfigValidation) {
  ScenarioConfig c = small();
  c.ed.set_size = 0;
  EXPECT_THROW(Simulation{c}, ConfigError);
  c = small();
  c.ed.set_size = std::uint64_t{1} << 20;
  EXPECT_THROW(Simulation{c}, ConfigError);
  c = small();
  c.ed.failure_threshold = 0;
  EXPECT_THROW(Simulation{c}, ConfigError);
}

}  // namespace
}  // namespace pufota::sim
