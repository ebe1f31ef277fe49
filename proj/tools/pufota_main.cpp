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

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "pufota/attacks.hpp"
#include "pufota/bench.hpp"
#include "pufota/config.hpp"
#include "pufota/error.hpp"
#include "pufota/fuzzy_extractor.hpp"
#include "pufota/store.hpp"

namespace {

using namespace pufota;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitReject = 2;
constexpr int kExitConfig = 3;

struct Common {
  std::string config_path;
  std::string profile;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> set_size;

  sim::ScenarioConfig resolve() const {
    sim::ScenarioConfig c = config_path.empty() ? sim::ScenarioConfig{} : config::load(config_path);
    if (!profile.empty()) c.profile = crypto::profile_by_name(profile).id;
    if (seed) c.seed = *seed;
    if (set_size) c.ed.set_size = *set_size;
    c.validate();
    return c;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + path);
}

int cmd_update(const Common& common, std::uint64_t firmware_bytes, const std::string& repo,
               const std::string& trace_path) {
  sim::ScenarioConfig c = common.resolve();
  if (firmware_bytes > 0) c.firmware_bytes = firmware_bytes;
  sim::Simulation s(c);
  if (!repo.empty()) {
    s.fds().clear_repository();
    for (auto& image : store::load_repo(repo)) s.fds().publish(std::move(image));
    if (s.fds().latest(s.device().installed().key()) == nullptr) {
      throw ConfigError("repository has no firmware for the device key");
    }
  }
  const auto o = s.run_update();
  const bool intact =
      o.accepted && s.device().firmware() == s.fds().latest(s.device().installed().key())->fi;
  if (!trace_path.empty()) write_text(trace_path, s.trace().to_jsonl());
  std::cout << s.trace().to_jsonl();
  const auto phases = sim::phase_times(s.trace());
  std::fprintf(stderr, "%-10s %s\n%-10s %s\n%-10s %.6f s\n%-10s %u\n",
               "profile", std::string(crypto::profile(c.profile).name).c_str(), "result",
               o.accepted ? (intact ? "accept" : "accept (firmware differs)")
                          : ("reject " + std::string(sim::to_string(*o.cause))).c_str(),
               "virtual", phases.total / 1e9, "installed", s.device().installed().sw_revision);
  return o.accepted && intact ? kExitOk : kExitReject;
}

int cmd_attack(const Common& common, const std::string& scenario, bool all,
               const std::string& probability) {
  const sim::ScenarioConfig c = common.resolve();
  std::vector<std::string> names;
  if (all) {
    for (auto n : attacks::kStrideScenarios) names.emplace_back(n);
    names.emplace_back("dictionary");
    names.emplace_back("mitm");
  } else if (!scenario.empty()) {
    names.push_back(scenario);
  } else {
    throw ConfigError("give --scenario NAME or --all");
  }
  bool ok = true;
  std::string table = "scenario    result  verdict\n";
  std::optional<attacks::ControlRun> control;
  for (const auto& name : names) {
    char line[200];
    if (name == "dictionary") {
      const auto d = attacks::size_dictionary(attacks::parse_probability(probability));
      const auto full = attacks::size_dictionary(1);
      nlohmann::ordered_json j;
      j["record"] = "dictionary";
      j["probability"] = probability;
      j["entries"] = d.entries.str();
      j["entries_sci"] = attacks::to_scientific(d.entries, 3);
      j["storage_pb"] = attacks::to_scientific(attacks::bits_to_petabytes(d.storage_bits), 2);
      j["pair_storage_pb"] =
          attacks::to_scientific(attacks::bits_to_petabytes(d.pair_storage_bits), 2);
      j["full_dictionary_pb"] =
          attacks::to_scientific(attacks::bits_to_petabytes(full.storage_bits), 2);
      std::cout << j.dump() << "\n";
      std::snprintf(line, sizeof line, "%-11s %-7s %s entries\n", "dictionary", "info",
                    attacks::to_scientific(d.entries, 3).c_str());
    } else if (name == "mitm") {
      const auto m = attacks::run_mitm_simulation(c);
      std::cout << m.to_json() << "\n";
      ok = ok && m.meters_match;
      std::snprintf(line, sizeof line, "%-11s %-7s meters %s, device %s\n", "mitm",
                    m.meters_match ? "ok" : "FAIL", m.meters_match ? "match" : "differ",
                    m.substituted_firmware_installed ? "installed substitute" : "refused");
    } else {
      if (!control && name != "redirect" && name != "intercept") control = attacks::run_control(c);
      const auto o = attacks::run_scenario(name, c, control ? &*control : nullptr);
      std::cout << o.to_json() << "\n";
      ok = ok && o.passed();
      std::snprintf(line, sizeof line, "%-11s %-7s %s\n", name.c_str(), o.passed() ? "ok" : "FAIL",
                    o.rejection_cause ? std::string(sim::to_string(*o.rejection_cause)).c_str()
                                      : "-");
    }
    table += line;
  }
  std::cerr << table;
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_bench(const Common& common, std::vector<std::uint64_t> sizes, bool calibrate) {
  const sim::ScenarioConfig c = common.resolve();
  if (calibrate) {
    std::string table = "profile  payload_per_kib_ns  worst_error\n";
    for (const auto& f : bench::calibrate(c)) {
      nlohmann::ordered_json j;
      j["record"] = "calibration";
      j["profile"] = crypto::profile(f.profile).name;
      j["payload_per_kib_ns"] = f.payload_per_kib;
      j["predicted_ns"] = f.predicted;
      j["worst_error"] = f.worst_error;
      std::cout << j.dump() << "\n";
      char line[120];
      std::snprintf(line, sizeof line, "%-7s  %18lld  %11.4f\n",
                    std::string(crypto::profile(f.profile).name).c_str(),
                    static_cast<long long>(f.payload_per_kib), f.worst_error);
      table += line;
    }
    std::cerr << table;
    return kExitOk;
  }
  if (sizes.empty()) sizes.assign(bench::kReferenceSizes.begin(), bench::kReferenceSizes.end());
  const auto report = bench::run_grid(c, sizes);
  std::cout << report.to_jsonl();
  std::cerr << report.summary_table();
  bool ok = report.monotonic_in_size();
  for (const auto& cell : report.cells) ok = ok && cell.accepted && cell.firmware_intact;
  std::cerr << "monotonic in size: " << (report.monotonic_in_size() ? "yes" : "NO") << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_sac(const Common& common, std::size_t vectors) {
  const sim::ScenarioConfig c = common.resolve();
  const auto puf = dppuf::DppufInstance::build(c.puf_config(c.seed));
  const auto r = dppuf::sac_report(puf, vectors, mix_seed(c.seed, 0x5ac));
  nlohmann::ordered_json j;
  j["record"] = "sac";
  j["width"] = c.puf_width;
  j["layers"] = c.puf_layers;
  j["vectors"] = r.vectors;
  j["mean"] = r.mean;
  j["histogram"] = r.histogram;
  std::cout << j.dump() << "\n";
  std::fprintf(stderr, "mean switching probability %.4f over %zu vectors\n", r.mean, r.vectors);
  return kExitOk;
}

int cmd_export(const Common& common, const std::string& out) {
  const sim::ScenarioConfig c = common.resolve();
  const auto puf = dppuf::DppufInstance::build(c.puf_config(c.seed));
  const auto model = dppuf::export_model(puf, c.costs()[WorkKind::ppuf_sim].fixed);
  const std::string text = dppuf::serialize_model(model);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  std::fprintf(stderr, "model %s\n", to_hex(model.id).c_str());
  return kExitOk;
}

int cmd_enroll(const Common& common, const std::string& store_path) {
  const sim::ScenarioConfig c = common.resolve();
  const auto puf = dppuf::DppufInstance::build(c.puf_config(c.seed));
  sim::PpmrEntry entry{dppuf::export_model(puf, c.costs()[WorkKind::ppuf_sim].fixed), {}};
  if (c.puf_width == 256) {
    // Reference enrollment on the response to the all-zero challenge.
    const fuzzy::FuzzyExtractor fe(fuzzy::BchCode::default_code(), c.puf_width);
    const auto response = puf.evaluate(BitString(c.puf_width));
    entry.helper =
        fe.generate(response, crypto::profile(c.profile).hash, mix_seed(c.seed, 0xe7)).helper;
  }
  std::vector<sim::PpmrEntry> entries;
  if (std::filesystem::exists(store_path)) entries = store::load_ppmr_store(store_path);
  for (const auto& e : entries) {
    if (e.model.id == entry.model.id) throw ConfigError("instance already enrolled");
  }
  entries.push_back(std::move(entry));
  store::save_ppmr_store(entries, store_path);
  nlohmann::ordered_json j;
  j["record"] = "enroll";
  j["id"] = to_hex(puf.id());
  j["store"] = store_path;
  j["models"] = entries.size();
  std::cout << j.dump() << "\n";
  std::fprintf(stderr, "enrolled %s (%zu models in store)\n", to_hex(puf.id()).c_str(),
               entries.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PUF-authenticated firmware update simulator"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON scenario config");
  app.add_option("--profile", common.profile, "light | mid | heavy");
  app.add_option("--seed", common.seed, "scenario seed");
  app.add_option("--set-size", common.set_size, "elements per request set");

  auto* update = app.add_subcommand("update", "run one honest update session");
  std::uint64_t firmware_bytes = 0;
  std::string repo, trace_path;
  update->add_option("--firmware-bytes", firmware_bytes, "synthetic firmware size");
  update->add_option("--repo", repo, "firmware manifest to serve instead");
  update->add_option("--trace", trace_path, "write the trace log here");

  auto* attack = app.add_subcommand("attack", "run attack scenarios");
  std::string scenario, probability = "0.01";
  bool all = false;
  attack->add_option("--scenario", scenario,
                     "rollback|mismatch|obsolete|redirect|tamper|intercept|dictionary|mitm");
  attack->add_flag("--all", all, "every scenario");
  attack->add_option("--probability", probability, "dictionary hit probability");

  auto* benchc = app.add_subcommand("bench", "profile x firmware size grid");
  std::vector<std::uint64_t> sizes;
  bool calibrate = false;
  benchc->add_option("--sizes", sizes, "firmware sizes in bytes");
  benchc->add_flag("--calibrate", calibrate, "refit the payload cipher cost");

  auto* sac = app.add_subcommand("sac", "strict avalanche measurement");
  std::size_t vectors = 10'000;
  sac->add_option("--vectors", vectors, "random challenges");

  auto* exportc = app.add_subcommand("export-model", "print a PPUF's public model");
  std::string out;
  exportc->add_option("--out", out, "output file");

  auto* enroll = app.add_subcommand("enroll", "add an instance to a model store");
  std::string store_path;
  enroll->add_option("--store", store_path, "model store file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  try {
    if (*update) return cmd_update(common, firmware_bytes, repo, trace_path);
    if (*attack) return cmd_attack(common, scenario, all, probability);
    if (*benchc) return cmd_bench(common, sizes, calibrate);
    if (*sac) return cmd_sac(common, vectors);
    if (*exportc) return cmd_export(common, out);
    if (*enroll) return cmd_enroll(common, store_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DecodeError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LookupError& e) {
    std::cerr << "lookup error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
