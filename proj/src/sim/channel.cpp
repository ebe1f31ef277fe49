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

#include "pufota/sim/channel.hpp"

#include "pufota/error.hpp"
#include "pufota/wire.hpp"

namespace pufota::sim {
namespace {

std::string describe(const Message& m) {
  try {
    return std::string(wire::to_string(wire::peek_kind(m.bytes)));
  } catch (const DecodeError&) {
    return "unframed";
  }
}

}  // namespace

VirtualTime LinkParams::transfer_time(std::uint64_t bytes) const {
  if (bytes_per_second == 0) return 0;
  // ceil(bytes * 1e9 / rate) without overflow for any realistic size
  const auto b = static_cast<unsigned __int128>(bytes) * kSecond;
  return static_cast<VirtualTime>((b + bytes_per_second - 1) / bytes_per_second);
}

Channel::Channel(VirtualClock& clock, Trace& trace, LinkParams link)
    : clock_(clock), trace_(trace), link_(link) {}

void Channel::attach(const std::string& name, Handler handler) {
  handlers_[name] = std::move(handler);
}

void Channel::send(const std::string& from, const std::string& to, Bytes bytes,
                   VirtualTime depart_at) {
  if (depart_at < clock_.now()) throw ContractError("message cannot depart in the past");
  Message m{next_id_++, from, to, std::move(bytes), depart_at};
  clock_.schedule(depart_at, [this, m = std::move(m)]() mutable { depart(std::move(m)); });
}

void Channel::depart(Message m) {
  ++sent_;
  bytes_sent_ += m.bytes.size();
  trace_.add(clock_.now(), m.from, "send", describe(m));
  VirtualTime extra = 0;
  if (adversary_ != nullptr) {
    adversary_->observe(m);
    if (adversary_->drop(m)) {
      ++dropped_;
      trace_.add(clock_.now(), "network", "drop", describe(m));
      return;
    }
    adversary_->modify(m);
    extra = adversary_->delay(m);
    if (extra < 0) throw ContractError("adversary delay must be non-negative");
  }
  const VirtualTime at = clock_.now() + link_.latency + link_.transfer_time(m.bytes.size()) + extra;
  clock_.schedule(at, [this, m = std::move(m)] { deliver(m); });
}

void Channel::inject(VirtualTime at, Message m) {
  if (at < clock_.now()) throw ContractError("cannot inject into the past");
  m.id = next_id_++;
  m.sent_at = at;
  ++sent_;
  bytes_sent_ += m.bytes.size();
  clock_.schedule(at, [this, m = std::move(m)] {
    trace_.add(clock_.now(), "adversary", "inject", describe(m));
    deliver(m);
  });
}

void Channel::deliver(const Message& m) {
  ++delivered_;
  trace_.add(clock_.now(), m.to, "receive", describe(m));
  auto it = handlers_.find(m.to);
  if (it != handlers_.end()) it->second(m);
}

}  // namespace pufota::sim
