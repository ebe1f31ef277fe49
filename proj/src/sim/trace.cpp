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

#include "pufota/sim/trace.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

namespace pufota::sim {

void Trace::add(VirtualTime time, std::string_view actor, std::string_view event,
                std::string_view cause) {
  records_.push_back({time, std::string(actor), std::string(event), std::string(cause)});
}

std::size_t Trace::count(std::string_view actor, std::string_view event) const {
  return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [&](const auto& r) {
    return r.actor == actor && r.event == event;
  }));
}

std::string Trace::to_jsonl() const {
  std::string out;
  for (const auto& r : records_) {
    nlohmann::ordered_json j;
    j["time"] = r.time;
    j["actor"] = r.actor;
    j["event"] = r.event;
    if (!r.cause.empty()) j["cause"] = r.cause;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace pufota::sim
