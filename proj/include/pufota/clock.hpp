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
#include <queue>
#include <vector>

namespace pufota {

// Virtual time in integer nanoseconds.
using VirtualTime = std::int64_t;

inline constexpr VirtualTime kMicrosecond = 1'000;
inline constexpr VirtualTime kMillisecond = 1'000'000;
inline constexpr VirtualTime kSecond = 1'000'000'000;

// Discrete-event time base. Events fire in (time, insertion order); time never
// moves backwards, so a seeded scenario always replays the same trace.
class VirtualClock {
 public:
  using Action = std::function<void()>;

  explicit VirtualClock(VirtualTime start = 0) : now_(start) {}

  VirtualTime now() const { return now_; }

  // Direct cost accounting outside the event loop.
  void advance(VirtualTime dt);
  void advance_to(VirtualTime t);

  std::uint64_t schedule(VirtualTime at, Action action);

  // Pops and runs the earliest event. Returns false when the queue is empty.
  bool run_next();
  void run();
  void run_until(VirtualTime limit);

  std::size_t pending() const { return queue_.size(); }

 private:
  struct Event {
    VirtualTime at;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  VirtualTime now_;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace pufota
