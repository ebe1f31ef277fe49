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

#include <string>
#include <string_view>
#include <vector>

#include "pufota/clock.hpp"

namespace pufota::sim {

struct TraceRecord {
  VirtualTime time = 0;
  std::string actor;
  std::string event;
  std::string cause;  // empty when not applicable

  bool operator==(const TraceRecord&) const = default;
};

// Append-only log of state transitions and channel events.
class Trace {
 public:
  void add(VirtualTime time, std::string_view actor, std::string_view event,
           std::string_view cause = {});

  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t count(std::string_view actor, std::string_view event) const;

  // One JSON object per line: {"time":..,"actor":..,"event":..,"cause":..}.
  std::string to_jsonl() const;

 private:
  std::vector<TraceRecord> records_;
};

}  // namespace pufota::sim
