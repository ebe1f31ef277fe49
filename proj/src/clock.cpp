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

#include "pufota/clock.hpp"

#include "pufota/error.hpp"

namespace pufota {

void VirtualClock::advance(VirtualTime dt) {
  if (dt < 0) throw ContractError("virtual time cannot move backwards");
  now_ += dt;
}

void VirtualClock::advance_to(VirtualTime t) {
  if (t < now_) throw ContractError("virtual time cannot move backwards");
  now_ = t;
}

std::uint64_t VirtualClock::schedule(VirtualTime at, Action action) {
  if (at < now_) throw ContractError("cannot schedule an event in the past");
  const auto seq = next_seq_++;
  queue_.push(Event{at, seq, std::move(action)});
  return seq;
}

bool VirtualClock::run_next() {
  if (queue_.empty()) return false;
  Event ev = queue_.top();
  queue_.pop();
  now_ = ev.at;
  ev.action();
  return true;
}

void VirtualClock::run() {
  while (run_next()) {
  }
}

void VirtualClock::run_until(VirtualTime limit) {
  while (!queue_.empty() && queue_.top().at <= limit) run_next();
  if (now_ < limit) now_ = limit;
}

}  // namespace pufota
