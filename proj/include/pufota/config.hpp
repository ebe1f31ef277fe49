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

#include <filesystem>
#include <string>
#include <string_view>

#include "pufota/sim/scenario.hpp"

namespace pufota::config {

// JSON form of a ScenarioConfig. Every key is optional on input and falls
// back to its default; unknown keys are rejected. Durations are integer
// nanoseconds of virtual time.
std::string emit(const sim::ScenarioConfig& config);
sim::ScenarioConfig parse(std::string_view json);  // throws ConfigError

sim::ScenarioConfig load(const std::filesystem::path& path);  // throws ConfigError, IoError
void save(const sim::ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace pufota::config
