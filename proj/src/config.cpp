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

#include "pufota/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pufota/error.hpp"

namespace pufota::config {
namespace {

using Json = nlohmann::ordered_json;

// Copies j[key] into `out` when present, with the key path in any error.
template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for '" + where + key + "'");
  }
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) throw ConfigError("unknown key '" + where + k + "'");
  }
}

}  // namespace

std::string emit(const sim::ScenarioConfig& c) {
  Json j;
  j["profile"] = crypto::profile(c.profile).name;
  j["seed"] = c.seed;
  j["base_epoch"] = c.base_epoch;
  j["firmware_bytes"] = c.firmware_bytes;
  j["puf"] = {{"width", c.puf_width}, {"layers", c.puf_layers}};
  j["costs"] = {{"preset", sim::to_string(c.cost_preset)}, {"esg_factor", c.esg_factor}};
  j["link"] = {{"latency_ns", c.link.latency}, {"bytes_per_second", c.link.bytes_per_second}};
  j["device"] = {{"response_deadline_ns", c.ed.response_deadline},
                 {"failure_threshold", c.ed.failure_threshold},
                 {"failure_window_ns", c.ed.failure_window},
                 {"cooldown_duration_ns", c.ed.cooldown_duration},
                 {"set_size", c.ed.set_size},
                 {"noise_flips", c.ed.noise_flips}};
  j["server"] = {{"timestamp_window_ns", c.fds.timestamp_window},
                 {"noise_flips", c.fds.noise_flips}};
  return j.dump(2) + "\n";
}

sim::ScenarioConfig parse(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, {"profile", "seed", "base_epoch", "firmware_bytes", "puf", "costs", "link", "device",
                "server"},
            "");
  sim::ScenarioConfig c;
  std::string profile(crypto::profile(c.profile).name);
  read(j, "profile", profile, "");
  try {
    c.profile = crypto::profile_by_name(profile).id;
  } catch (const Error&) {
    throw ConfigError("unknown profile '" + profile + "'");
  }
  read(j, "seed", c.seed, "");
  read(j, "base_epoch", c.base_epoch, "");
  read(j, "firmware_bytes", c.firmware_bytes, "");
  if (j.contains("puf")) {
    const auto& p = j["puf"];
    only_keys(p, {"width", "layers"}, "puf.");
    read(p, "width", c.puf_width, "puf.");
    read(p, "layers", c.puf_layers, "puf.");
  }
  if (j.contains("costs")) {
    const auto& p = j["costs"];
    only_keys(p, {"preset", "esg_factor"}, "costs.");
    std::string preset(sim::to_string(c.cost_preset));
    read(p, "preset", preset, "costs.");
    c.cost_preset = sim::cost_preset_by_name(preset);
    read(p, "esg_factor", c.esg_factor, "costs.");
  }
  if (j.contains("link")) {
    const auto& p = j["link"];
    only_keys(p, {"latency_ns", "bytes_per_second"}, "link.");
    read(p, "latency_ns", c.link.latency, "link.");
    read(p, "bytes_per_second", c.link.bytes_per_second, "link.");
  }
  if (j.contains("device")) {
    const auto& p = j["device"];
    only_keys(p, {"response_deadline_ns", "failure_threshold", "failure_window_ns",
                  "cooldown_duration_ns", "set_size", "noise_flips"},
              "device.");
    read(p, "response_deadline_ns", c.ed.response_deadline, "device.");
    read(p, "failure_threshold", c.ed.failure_threshold, "device.");
    read(p, "failure_window_ns", c.ed.failure_window, "device.");
    read(p, "cooldown_duration_ns", c.ed.cooldown_duration, "device.");
    read(p, "set_size", c.ed.set_size, "device.");
    read(p, "noise_flips", c.ed.noise_flips, "device.");
  }
  if (j.contains("server")) {
    const auto& p = j["server"];
    only_keys(p, {"timestamp_window_ns", "noise_flips"}, "server.");
    read(p, "timestamp_window_ns", c.fds.timestamp_window, "server.");
    read(p, "noise_flips", c.fds.noise_flips, "server.");
  }
  c.validate();
  return c;
}

sim::ScenarioConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void save(const sim::ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write config " + path.string());
  out << emit(config);
  if (!out.flush()) throw IoError("write failed for " + path.string());
}

}  // namespace pufota::config
