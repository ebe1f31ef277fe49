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

#include "pufota/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "pufota/error.hpp"

namespace pufota::bench {
namespace {

double reference_ns(crypto::ProfileId profile, std::size_t size_index) {
  return kReferenceSeconds[static_cast<std::size_t>(profile)][size_index] * 1e9;
}

double worst_error_at(double p, const std::array<double, 3>& t0, const std::array<double, 3>& k,
                      const std::array<double, 3>& ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs((t0[i] + p * k[i]) / ref[i] - 1.0));
  }
  return worst;
}

VirtualTime accepted_time(const sim::ScenarioConfig& cfg, crypto::ProfileId profile,
                          std::uint64_t bytes, const CostModel& costs) {
  const BenchCell cell = run_cell(cfg, profile, bytes, costs);
  if (!cell.accepted) throw ContractError("calibration run was rejected");
  return cell.virtual_time;
}

}  // namespace

bool BenchReport::monotonic_in_size() const {
  std::map<crypto::ProfileId, std::vector<const BenchCell*>> by_profile;
  for (const auto& c : cells) by_profile[c.profile].push_back(&c);
  for (auto& [profile, list] : by_profile) {
    std::sort(list.begin(), list.end(),
              [](auto* a, auto* b) { return a->firmware_bytes < b->firmware_bytes; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->firmware_bytes > list[i - 1]->firmware_bytes &&
          list[i]->virtual_time <= list[i - 1]->virtual_time) {
        return false;
      }
    }
  }
  return true;
}

std::string BenchReport::to_jsonl() const {
  std::string out;
  for (const auto& c : cells) {
    nlohmann::ordered_json j;
    j["record"] = "bench";
    j["profile"] = crypto::profile(c.profile).name;
    j["firmware_bytes"] = c.firmware_bytes;
    j["accepted"] = c.accepted;
    j["firmware_intact"] = c.firmware_intact;
    j["virtual_ns"] = c.virtual_time;
    j["wall_seconds"] = c.wall_seconds;
    j["bytes_on_wire"] = c.bytes_on_wire;
    j["phases_ns"] = {{"request", c.phases.request},   {"search", c.phases.search},
                      {"package", c.phases.package},   {"transfer", c.phases.transfer},
                      {"unpack", c.phases.unpack}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string BenchReport::summary_table() const {
  std::string out = "profile  firmware_bytes  virtual_s   wall_s  result\n";
  char line[160];
  for (const auto& c : cells) {
    std::snprintf(line, sizeof line, "%-7s  %14llu  %9.4f  %7.2f  %s\n",
                  std::string(crypto::profile(c.profile).name).c_str(),
                  static_cast<unsigned long long>(c.firmware_bytes), c.virtual_time / 1e9,
                  c.wall_seconds, c.accepted && c.firmware_intact ? "accept" : "FAIL");
    out += line;
  }
  return out;
}

BenchCell run_cell(sim::ScenarioConfig base, crypto::ProfileId profile,
                   std::uint64_t firmware_bytes, std::optional<CostModel> costs) {
  base.profile = profile;
  base.firmware_bytes = firmware_bytes;
  const auto start = std::chrono::steady_clock::now();
  sim::Simulation s(base, std::move(costs));
  const sim::UpdateOutcome outcome = s.run_update();
  BenchCell cell;
  cell.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  cell.profile = profile;
  cell.firmware_bytes = firmware_bytes;
  cell.accepted = outcome.accepted;
  cell.firmware_intact = s.device().firmware() == s.release().fi;
  cell.virtual_time = outcome.decided - outcome.started;
  cell.bytes_on_wire = s.channel().bytes_sent();
  cell.phases = sim::phase_times(s.trace());
  return cell;
}

BenchReport run_grid(const sim::ScenarioConfig& base, const std::vector<std::uint64_t>& sizes) {
  BenchReport r;
  for (auto profile : crypto::kAllProfiles) {
    for (auto size : sizes) r.cells.push_back(run_cell(base, profile, size));
  }
  return r;
}

double worst_relative_error(const std::array<VirtualTime, 3>& simulated,
                            crypto::ProfileId profile) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double ref = reference_ns(profile, i);
    worst = std::max(worst, std::abs(static_cast<double>(simulated[i]) / ref - 1.0));
  }
  return worst;
}

std::vector<CalibrationFit> calibrate(const sim::ScenarioConfig& base) {
  constexpr VirtualTime kProbe = 1 << 17;
  std::vector<CalibrationFit> fits;
  for (auto profile : crypto::kAllProfiles) {
    sim::ScenarioConfig cfg = base;
    cfg.profile = profile;
    // Probe runs may be slower than any real deadline.
    cfg.ed.response_deadline = 3600 * kSecond;
    CostModel held = cfg.costs();
    held[WorkKind::payload_cipher].per_kib = 0;
    CostModel probe = held, probe2 = held;
    probe[WorkKind::payload_cipher].per_kib = kProbe;
    probe2[WorkKind::payload_cipher].per_kib = 2 * kProbe;

    std::array<double, 3> t0{}, k{}, ref{};
    for (std::size_t i = 0; i < 3; ++i) {
      // Both probes keep the payload cipher on the critical path; at low rates
      // the model query round trip hides part of the FDS encryption.
      const auto a = accepted_time(cfg, profile, kReferenceSizes[i], probe);
      const auto b = accepted_time(cfg, profile, kReferenceSizes[i], probe2);
      k[i] = static_cast<double>(b - a) / kProbe;
      t0[i] = static_cast<double>(a) - k[i] * kProbe;
      ref[i] = reference_ns(profile, i);
    }
    // The worst error is convex and piecewise linear in p; its minimum sits
    // where two of the signed errors meet with equal or opposite sign.
    std::vector<double> candidates;
    for (std::size_t i = 0; i < 3; ++i) {
      candidates.push_back((ref[i] - t0[i]) / k[i]);
      for (std::size_t j = i + 1; j < 3; ++j) {
        const double ai = k[i] / ref[i], bi = t0[i] / ref[i] - 1.0;
        const double aj = k[j] / ref[j], bj = t0[j] / ref[j] - 1.0;
        if (ai != aj) candidates.push_back((bj - bi) / (ai - aj));
        candidates.push_back(-(bi + bj) / (ai + aj));
      }
    }
    double best = std::numeric_limits<double>::infinity();
    VirtualTime best_p = 0;
    for (double c : candidates) {
      for (double p : {std::floor(c), std::ceil(c)}) {
        if (p < 0) continue;
        const double e = worst_error_at(p, t0, k, ref);
        if (e < best) {
          best = e;
          best_p = static_cast<VirtualTime>(p);
        }
      }
    }

    CalibrationFit fit;
    fit.profile = profile;
    fit.payload_per_kib = best_p;
    CostModel fitted = held;
    fitted[WorkKind::payload_cipher].per_kib = best_p;
    for (std::size_t i = 0; i < 3; ++i) {
      fit.predicted[i] = accepted_time(cfg, profile, kReferenceSizes[i], fitted);
    }
    fit.worst_error = worst_relative_error(fit.predicted, profile);
    fits.push_back(fit);
  }
  return fits;
}

}  // namespace pufota::bench
