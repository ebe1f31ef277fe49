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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails. Runs at the default scenario
// scale (set size 10^6), so expect several minutes on a desktop.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pufota/attacks.hpp"
#include "pufota/bench.hpp"
#include "pufota/crypto/hash.hpp"
#include "pufota/dppuf.hpp"
#include "pufota/error.hpp"
#include "pufota/fuzzy_extractor.hpp"
#include "pufota/rng.hpp"
#include "pufota/sim/scenario.hpp"
#include "pufota/wire.hpp"
#include "support/golden.hpp"

namespace pufota {
namespace {

using crypto::ProfileId;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Verdict sac() {
  const sim::ScenarioConfig c;
  const auto puf = dppuf::DppufInstance::build(c.puf_config(c.seed));
  const auto start = Clock::now();
  const double mean = dppuf::sac_metric(puf, 10'000, 0x5ac);
  const double secs = seconds_since(start);
  return {std::abs(mean - 0.3425) <= 0.05 && secs <= 60.0,
          fmt("mean %.4f over 10000 vectors (target 0.3425 +/- 0.05), %.1f s", mean, secs)};
}

Verdict dictionary() {
  using attacks::BigInt;
  const auto d = attacks::size_dictionary(attacks::parse_probability("0.01"));
  const auto full = attacks::size_dictionary(1);
  // Independent: ceil(2^256 / 100) and 2 * 2^256 bits in petabytes.
  const BigInt two256 = BigInt(1) << 256;
  const bool exact = d.entries == (two256 + 99) / 100 && full.storage_bits == 2 * two256;
  const std::string entries = attacks::to_scientific(d.entries, 3);
  const std::string pb = attacks::to_scientific(attacks::bits_to_petabytes(full.storage_bits), 2);
  return {exact && entries == "1.16e75" && pb == "2.9e61",
          "c=0.01 -> " + entries + " entries; full dictionary " + pb + " PB"};
}

Verdict race() {
  const auto run = attacks::run_mitm_simulation(sim::ScenarioConfig{});
  const auto& k = run.costs;
  const auto n = static_cast<VirtualTime>(k.n);
  const bool meters = run.meters_match &&
                      run.attacker_meter == (n + 2) * k.t_hash + k.t_dec1 + 4 * k.t_dec2 &&
                      run.server_meter == (n + 1) * k.t_hash + k.t_dec1 + 2 * k.t_dec2;

  Rng rng(20260101);
  std::size_t held = 0;
  for (int i = 0; i < 1000; ++i) {
    attacks::RaceCosts c;
    c.t_hash = 1 + static_cast<VirtualTime>(uniform_below(rng, 1'000'000));
    c.t_dec1 = 1 + static_cast<VirtualTime>(uniform_below(rng, 1'000'000));
    c.t_dec2 = 1 + static_cast<VirtualTime>(uniform_below(rng, 1'000'000));
    c.n = 1 + uniform_below(rng, SetDescriptor::kMaxCount);
    const auto r = attacks::mitm_race_analysis(c);
    const VirtualTime gap = r.attacker_time - r.server_time;
    if (gap == c.t_hash + 2 * c.t_dec2 && gap > 0 && r.server_advantage) ++held;
  }
  return {meters && held == 1000,
          fmt("n=%llu attacker %lld, server %lld (closed forms %s); gap property %zu/1000",
              static_cast<unsigned long long>(k.n), static_cast<long long>(run.attacker_meter),
              static_cast<long long>(run.server_meter), meters ? "equal" : "DIFFER", held)};
}

constexpr std::uint64_t kHonestSizes[] = {0, 1, 233'000, 323'000, 1'183'000};

std::vector<bench::BenchCell> honest_runs() {
  std::vector<bench::BenchCell> cells;
  for (auto profile : crypto::kAllProfiles) {
    for (auto size : kHonestSizes) {
      cells.push_back(bench::run_cell(sim::ScenarioConfig{}, profile, size));
      const auto& c = cells.back();
      std::fprintf(stderr, "  honest %-5s %8llu B: %s, %.1f s wall\n",
                   std::string(crypto::profile(profile).name).c_str(),
                   static_cast<unsigned long long>(size),
                   c.accepted && c.firmware_intact ? "accept" : "FAIL", c.wall_seconds);
    }
  }
  return cells;
}

Verdict honest(const std::vector<bench::BenchCell>& cells) {
  std::size_t ok = 0;
  double slowest = 0;
  for (const auto& c : cells) {
    if (c.accepted && c.firmware_intact && c.wall_seconds <= 30.0) ++ok;
    slowest = std::max(slowest, c.wall_seconds);
  }
  return {ok == 15 && cells.size() == 15,
          fmt("%zu/15 runs accepted with identical firmware within 30 s (slowest %.1f s)", ok,
              slowest)};
}

Verdict reference_table(const std::vector<bench::BenchCell>& cells) {
  bool monotonic = true;
  double worst = 0;
  std::string rows;
  for (std::size_t p = 0; p < 3; ++p) {
    std::map<std::uint64_t, VirtualTime> by_size;
    for (const auto& c : cells) {
      if (c.profile == crypto::kAllProfiles[p]) by_size[c.firmware_bytes] = c.virtual_time;
    }
    VirtualTime prev = -1;
    for (const auto& [size, t] : by_size) {
      monotonic = monotonic && t > prev;
      prev = t;
    }
    std::array<VirtualTime, 3> row{};
    for (std::size_t i = 0; i < 3; ++i) row[i] = by_size[bench::kReferenceSizes[i]];
    const double e = bench::worst_relative_error(row, crypto::kAllProfiles[p]);
    worst = std::max(worst, e);
    const std::string name(crypto::profile(crypto::kAllProfiles[p]).name);
    rows += fmt(" %s %.4f/%.4f/%.4f s", name.c_str(), row[0] / 1e9, row[1] / 1e9, row[2] / 1e9);
  }
  return {monotonic && worst <= 0.05,
          fmt("monotonic %s, worst error %.2f%% (limit 5%%);", monotonic ? "yes" : "NO",
              worst * 100) +
              rows};
}

Verdict stride() {
  const sim::ScenarioConfig c;
  const auto control = attacks::run_control(c);
  bool all = control.accepted && control.firmware_intact;
  bool cooldown = false;
  std::string detail = control.accepted ? "control accept;" : "control REJECTED;";
  for (auto name : attacks::kStrideScenarios) {
    const bool own = name == "redirect" || name == "intercept";
    const auto o = attacks::run_scenario(name, c, own ? nullptr : &control);
    all = all && o.passed();
    if (name == "tamper") {
      for (const auto& check : o.checks) {
        if (check.rfind("cooldown_engaged: yes", 0) == 0) cooldown = true;
      }
    }
    std::string verdict = "FAIL";
    if (o.passed()) {
      verdict = o.rejection_cause ? std::string(sim::to_string(*o.rejection_cause)) : "defeated";
    }
    detail += " " + std::string(name) + "=" + verdict;
    std::fprintf(stderr, "  %s\n", o.to_json().c_str());
  }
  return {all && cooldown, detail + (cooldown ? "; tamper cooldown engaged" : "; NO cooldown")};
}

BitString random_response(Rng& rng, std::size_t bits) {
  return BitString::from_bytes(random_bytes(rng, (bits + 7) / 8), bits);
}

Verdict fuzzy_extractor() {
  // Small code: every error pattern of weight <= t, several enrollments.
  const fuzzy::FuzzyExtractor small(fuzzy::BchCode::small_code(), 15);
  Rng rng(7);
  std::size_t small_ok = 0, small_total = 0;
  for (int e = 0; e < 8; ++e) {
    const BitString r = random_response(rng, 15);
    const auto enr = small.generate(r, crypto::HashAlgorithm::sha256, rng());
    for (std::uint32_t mask = 0; mask < (1u << 15); ++mask) {
      if (std::popcount(mask) > 3) continue;
      BitString noisy = r;
      for (std::size_t i = 0; i < 15; ++i) {
        if ((mask >> i) & 1) noisy.flip(i);
      }
      ++small_total;
      try {
        if (small.reproduce(noisy, enr.helper) == enr.key) ++small_ok;
      } catch (const ExtractionError&) {
      }
    }
  }

  // Default code over a 256-bit response: random weight 0..t in every block.
  const fuzzy::FuzzyExtractor fe(fuzzy::BchCode::default_code(), 256);
  const unsigned t = fe.code().t();
  std::size_t sampled_ok = 0;
  constexpr std::size_t kTrials = 10'000;
  for (std::size_t trial = 0; trial < kTrials; ++trial) {
    const BitString r = random_response(rng, 256);
    const auto enr = fe.generate(r, crypto::HashAlgorithm::sha256, rng());
    BitString noisy = r;
    std::size_t base = 0;
    for (std::size_t seg : fe.segments()) {
      const std::size_t w = trial % 4 == 0 ? t : uniform_below(rng, t + 1);
      std::vector<std::size_t> pos(seg);
      for (std::size_t i = 0; i < seg; ++i) pos[i] = i;
      for (std::size_t i = 0; i < w; ++i) std::swap(pos[i], pos[i + uniform_below(rng, seg - i)]);
      for (std::size_t i = 0; i < w; ++i) noisy.flip(base + pos[i]);
      base += seg;
    }
    try {
      if (fe.reproduce(noisy, enr.helper) == enr.key) ++sampled_ok;
    } catch (const ExtractionError&) {
    }
  }

  // t + 1 adjacent flips inside one block.
  std::size_t refused = 0, wrong_key = 0, bursts = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const BitString r = random_response(rng, 256);
    const auto enr = fe.generate(r, crypto::HashAlgorithm::sha256, rng());
    const std::size_t block = trial % fe.segments().size();
    std::size_t base = 0;
    for (std::size_t b = 0; b < block; ++b) base += fe.segments()[b];
    const std::size_t start = uniform_below(rng, fe.segments()[block] - t);
    BitString noisy = r;
    for (std::size_t i = 0; i <= t; ++i) noisy.flip(base + start + i);
    ++bursts;
    try {
      if (fe.reproduce(noisy, enr.helper) != enr.key) ++wrong_key;
    } catch (const ExtractionError&) {
      ++refused;
    }
  }
  const bool pass =
      small_ok == small_total && small_total == 8 * 576 && sampled_ok == kTrials &&
      refused + wrong_key == bursts;
  return {pass, fmt("small code %zu/%zu exhaustive; default %zu/%zu sampled; t+1 bursts "
                    "detected %zu/%zu (refused %zu, wrong key %zu)",
                    small_ok, small_total, sampled_ok, kTrials, refused + wrong_key, bursts,
                    refused, wrong_key)};
}

Verdict wire_stability() {
  std::size_t identical = 0, flips = 0, rejected = 0;
  for (auto id : crypto::kAllProfiles) {
    const Bytes a = wire::encode(testing::golden_request(id));
    const Bytes b = wire::encode(testing::golden_request(id));
    const auto golden = testing::read_golden(PUFOTA_TESTDATA_DIR, testing::request_file(id));
    const auto it = golden.find("frame");
    if (it == golden.end()) continue;
    if (a == b && to_hex(a) == it->second) ++identical;
    const Bytes frame = from_hex(it->second);
    for (std::size_t bit = 0; bit < frame.size() * 8; ++bit) {
      Bytes bad = frame;
      bad[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
      ++flips;
      try {
        wire::decode_update_request(bad, id);
      } catch (const DecodeError&) {
        ++rejected;
      }
    }
  }
  return {identical == 3 && flips > 0 && rejected == flips,
          fmt("%zu/3 profiles byte-identical to golden; %zu/%zu single-bit flips rejected",
              identical, rejected, flips)};
}

// The trace holds timing only, and the full-set scan makes timing independent
// of the seed. The session material (element, key, nonces, ciphertext) is
// where the seed shows, so it is compared as well.
Verdict determinism() {
  struct Run {
    std::string trace;
    std::string session;
  };
  auto run = [](const sim::ScenarioConfig& c) {
    sim::Simulation s(c);
    s.run_update();
    std::string session;
    for (const auto& f : s.fds().sessions()) {
      session += std::to_string(f.i1) + ":" + to_hex(f.session_key) + ":" + to_hex(f.nonce_outer) +
                 ":" + to_hex(f.nonce_inner) + ":" +
                 to_hex(crypto::digest(crypto::HashAlgorithm::sha256, f.outer)) + ";";
    }
    return Run{s.trace().to_jsonl(), session};
  };
  sim::ScenarioConfig c;
  c.profile = ProfileId::midweight;
  const Run a = run(c);
  const Run b = run(c);
  c.seed = 2;
  const Run other = run(c);

  sim::ScenarioConfig small;
  small.ed.set_size = 2000;
  const std::string t1 = attacks::run_tamper_attack(small).to_json();
  const std::string t2 = attacks::run_tamper_attack(small).to_json();
  const bool same = !a.trace.empty() && a.trace == b.trace && a.session == b.session;
  const bool seeded = !a.session.empty() && a.session != other.session;
  return {same && seeded && t1 == t2,
          fmt("honest trace (%zu bytes) and session material identical on rerun (%s); "
              "session material differs under another seed (%s); tamper report identical (%s)",
              a.trace.size(), same ? "yes" : "NO", seeded ? "yes" : "NO", t1 == t2 ? "yes" : "NO")};
}

}  // namespace
}  // namespace pufota

// With arguments, only the listed criteria run (6 implies 4).
int main(int argc, char** argv) {
  using namespace pufota;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  if (only.count(6)) only.insert(4);
  int failures = 0;
  auto report = [&](int number, const char* name, const std::function<Verdict()>& check) {
    if (!only.empty() && !only.count(number)) return;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %d %-18s %s\n", v.pass ? "PASS" : "FAIL", number, name, v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "sac", sac);
  report(2, "dictionary", dictionary);
  report(3, "mitm-race", race);
  std::vector<bench::BenchCell> cells;
  report(4, "honest-path", [&] {
    cells = honest_runs();
    return honest(cells);
  });
  report(5, "stride", stride);
  report(6, "reference-table", [&] { return reference_table(cells); });
  report(7, "fuzzy-extractor", fuzzy_extractor);
  report(8, "wire-stability", wire_stability);
  report(9, "determinism", determinism);
  return failures == 0 ? 0 : 1;
}
