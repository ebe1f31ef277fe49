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
#include <functional>
#include <map>
#include <string>

#include "pufota/bits.hpp"
#include "pufota/clock.hpp"
#include "pufota/cost.hpp"
#include "pufota/sim/trace.hpp"

namespace pufota::sim {

struct Message {
  std::uint64_t id = 0;
  std::string from;
  std::string to;
  Bytes bytes;
  VirtualTime sent_at = 0;
};

// Dolev-Yao interposition on every link. The channel calls the hooks in the
// order observe -> drop -> modify -> delay. The default implementation is a
// passive network.
class Adversary {
 public:
  explicit Adversary(const CostModel& costs) : meter_(costs) {}
  virtual ~Adversary() = default;

  virtual void observe(const Message&) {}
  virtual bool drop(const Message&) { return false; }
  virtual void modify(Message&) {}
  virtual VirtualTime delay(const Message&) { return 0; }

  // Work done by the adversary, metered at the same rates as the FDS.
  Meter& meter() { return meter_; }
  const Meter& meter() const { return meter_; }

 private:
  Meter meter_;
};

struct LinkParams {
  VirtualTime latency = 0;
  std::uint64_t bytes_per_second = 0;  // 0 = infinite

  // Time to push `bytes` onto the link.
  VirtualTime transfer_time(std::uint64_t bytes) const;
  bool operator==(const LinkParams&) const = default;
};

class Channel {
 public:
  using Handler = std::function<void(const Message&)>;

  Channel(VirtualClock& clock, Trace& trace, LinkParams link);

  void attach(const std::string& name, Handler handler);
  void set_adversary(Adversary* adversary) { adversary_ = adversary; }

  // Departs at `depart` (>= now), typically when the sender finishes its
  // work. Delivery = depart + latency + len / bandwidth + adversary delay.
  void send(const std::string& from, const std::string& to, Bytes bytes, VirtualTime depart);

  // Adversary-originated message; bypasses the hooks.
  void inject(VirtualTime at, Message message);

  std::uint64_t sent() const { return sent_; }
  std::uint64_t delivered() const { return delivered_; }
  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t in_flight() const { return sent_ - delivered_ - dropped_; }
  std::uint64_t bytes_sent() const { return bytes_sent_; }

  const LinkParams& link() const { return link_; }

 private:
  void depart(Message message);
  void deliver(const Message& message);

  VirtualClock& clock_;
  Trace& trace_;
  LinkParams link_;
  Adversary* adversary_ = nullptr;
  std::map<std::string, Handler> handlers_;
  std::uint64_t next_id_ = 1;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t bytes_sent_ = 0;
};

}  // namespace pufota::sim
