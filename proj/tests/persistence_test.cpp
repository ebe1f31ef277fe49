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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "pufota/config.hpp"
#include "pufota/crypto/hash.hpp"
#include "pufota/error.hpp"
#include "pufota/fuzzy_extractor.hpp"
#include "pufota/store.hpp"

namespace pufota {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("pufota_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, std::string_view s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

TEST(Config, RoundTripDefaultAndCustom) {
  sim::ScenarioConfig c;
  EXPECT_EQ(config::parse(config::emit(c)), c);
  c.profile = crypto::ProfileId::heavyweight;
  c.seed = 99;
  c.puf_width = 128;
  c.puf_layers = 10;
  c.cost_preset = sim::CostPreset::symbolic;
  c.esg_factor = 5000;
  c.link = {3 * kMillisecond, 11'520};
  c.ed.response_deadline = 7 * kSecond;
  c.ed.failure_threshold = 5;
  c.ed.set_size = 12345;
  c.fds.timestamp_window = 10 * kSecond;
  c.firmware_bytes = 1;
  EXPECT_EQ(config::parse(config::emit(c)), c);
  c.puf_width = 256;
  c.ed.noise_flips = 3;
  c.fds.noise_flips = 4;
  EXPECT_EQ(config::parse(config::emit(c)), c);
}

TEST(Config, PartialInputKeepsDefaults) {
  const auto c = config::parse(R"({"profile": "mid", "device": {"set_size": 77}})");
  EXPECT_EQ(c.profile, crypto::ProfileId::midweight);
  EXPECT_EQ(c.ed.set_size, 77u);
  EXPECT_EQ(c.ed.response_deadline, sim::EdConfig{}.response_deadline);
  EXPECT_EQ(c.seed, sim::ScenarioConfig{}.seed);
}

TEST(Config, Errors) {
  EXPECT_THROW(config::parse(R"({"sede": 1})"), ConfigError);
  EXPECT_THROW(config::parse(R"({"device": {"deadline": 1}})"), ConfigError);
  EXPECT_THROW(config::parse(R"({"profile": "ultra"})"), ConfigError);
  EXPECT_THROW(config::parse(R"({"seed": "one"})"), ConfigError);
  EXPECT_THROW(config::parse(R"({"puf": {"width": 12}})"), ConfigError);
  EXPECT_THROW(config::parse(R"({"costs": {"esg_factor": 0}})"), ConfigError);
  EXPECT_THROW(config::parse("{"), ConfigError);
  EXPECT_THROW(config::load("/nonexistent/pufota.json"), IoError);
}

TEST(Config, FileRoundTrip) {
  TempDir dir;
  sim::ScenarioConfig c;
  c.seed = 5;
  config::save(c, dir.path() / "c.json");
  EXPECT_EQ(config::load(dir.path() / "c.json"), c);
}

sim::FirmwareImage image(std::uint32_t sw, std::uint64_t size) {
  sim::FirmwareImage img;
  img.fi = sim::synthetic_firmware(size, sw);
  img.fv = {0x5a17, 0x0102, 3, sw, 2'000'000'000, 1'700'000'000 + sw};
  return img;
}

TEST(Repo, AddAndLoad) {
  TempDir dir;
  const fs::path manifest = dir.path() / "repo.json";
  store::add_release(manifest, image(2, 1000), "fw2.bin");
  store::add_release(manifest, image(3, 2000), "fw3.bin");
  const auto images = store::load_repo(manifest);
  ASSERT_EQ(images.size(), 2u);
  EXPECT_EQ(images[0].fi, image(2, 1000).fi);
  EXPECT_EQ(images[1].fv, image(3, 2000).fv);
  const auto m = store::parse_manifest(slurp(manifest));
  EXPECT_EQ(m.entries[0].sha256,
            to_hex(crypto::digest(crypto::HashAlgorithm::sha256, image(2, 1000).fi)));
  EXPECT_EQ(store::parse_manifest(store::emit_manifest(m)).entries.size(), 2u);
}

TEST(Repo, NonIncreasingRevisionRefused) {
  TempDir dir;
  const fs::path manifest = dir.path() / "repo.json";
  store::add_release(manifest, image(3, 10), "a.bin");
  EXPECT_THROW(store::add_release(manifest, image(3, 10), "b.bin"), ConfigError);
  EXPECT_THROW(store::add_release(manifest, image(2, 10), "c.bin"), ConfigError);
  store::RepoManifest m;
  m.entries.push_back({image(4, 1).fv, "x", ""});
  m.entries.push_back({image(4, 1).fv, "y", ""});
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(Repo, HashMismatchRefused) {
  TempDir dir;
  const fs::path manifest = dir.path() / "repo.json";
  store::add_release(manifest, image(2, 100), "fw.bin");
  std::string payload = slurp(dir.path() / "fw.bin");
  payload[10] ^= 1;
  spit(dir.path() / "fw.bin", payload);
  EXPECT_THROW(store::load_repo(manifest), ConfigError);
  fs::remove(dir.path() / "fw.bin");
  EXPECT_THROW(store::load_repo(manifest), IoError);
}

TEST(Repo, ManifestFormatChecked) {
  EXPECT_THROW(store::parse_manifest(R"({"format": "other", "version": 1, "entries": []})"),
               ConfigError);
  EXPECT_THROW(store::parse_manifest(R"({"format": "pufota-repo", "version": 2, "entries": []})"),
               ConfigError);
}

std::vector<sim::PpmrEntry> models(int count, bool helper) {
  std::vector<sim::PpmrEntry> out;
  for (int i = 0; i < count; ++i) {
    dppuf::DppufConfig cfg;
    cfg.width = 16;
    cfg.seed = static_cast<std::uint64_t>(i + 1);
    const auto inst = dppuf::DppufInstance::build(cfg);
    sim::PpmrEntry e{dppuf::export_model(inst, 2000), std::nullopt};
    if (helper && i % 2 == 0) {
      fuzzy::FuzzyExtractor fe(fuzzy::BchCode::small_code(), 16);
      e.helper = fe.generate(inst.evaluate(BitString(16)), crypto::HashAlgorithm::sha256, 1).helper;
    }
    out.push_back(std::move(e));
  }
  return out;
}

bool same(const std::vector<sim::PpmrEntry>& a, const std::vector<sim::PpmrEntry>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].model == b[i].model) || a[i].helper != b[i].helper) return false;
  }
  return true;
}

TEST(PpmrStore, RoundTripAndLookup) {
  TempDir dir;
  const auto entries = models(3, true);
  store::save_ppmr_store(entries, dir.path() / "ppmr.txt");
  const auto back = store::load_ppmr_store(dir.path() / "ppmr.txt");
  EXPECT_TRUE(same(back, entries));
  EXPECT_EQ(store::encode_ppmr_store(back), slurp(dir.path() / "ppmr.txt"));
  for (const auto& e : entries) {
    auto it = std::find_if(back.begin(), back.end(),
                           [&](const sim::PpmrEntry& b) { return b.model.id == e.model.id; });
    ASSERT_NE(it, back.end());
    EXPECT_EQ(it->model, e.model);
  }
}

TEST(PpmrStore, CorruptInputsRejected) {
  const std::string text = store::encode_ppmr_store(models(2, false));
  for (std::size_t cut : {std::size_t{0}, std::size_t{10}, text.size() / 2, text.size() - 3}) {
    EXPECT_THROW(store::decode_ppmr_store(text.substr(0, cut)), DecodeError) << cut;
  }
  std::string bad = text;
  bad.replace(0, std::string("pufota-ppmr-store 1").size(), "pufota-ppmr-store 9");
  EXPECT_THROW(store::decode_ppmr_store(bad), DecodeError);
  bad = text;
  bad[text.find("width") + 7] ^= 1;  // body no longer matches its digest
  EXPECT_THROW(store::decode_ppmr_store(bad), DecodeError);
  EXPECT_THROW(store::load_ppmr_store("/nonexistent/ppmr.txt"), IoError);
}

TEST(PpmrStore, AppendOnly) {
  TempDir dir;
  const fs::path path = dir.path() / "ppmr.txt";
  auto entries = models(2, false);
  store::save_ppmr_store(entries, path);
  const std::string before = slurp(path);

  auto more = models(3, false);
  store::save_ppmr_store(more, path);
  EXPECT_EQ(store::load_ppmr_store(path).size(), 3u);
  EXPECT_EQ(slurp(path).rfind(before.substr(0, before.rfind("end "))), 0u);

  EXPECT_THROW(store::save_ppmr_store(entries, path), IoError);  // would drop one
  more[1].model.simulation_cost_per_eval += 1;
  EXPECT_THROW(store::save_ppmr_store(more, path), IoError);  // would alter one
  EXPECT_EQ(store::load_ppmr_store(path).size(), 3u);
}

}  // namespace
}  // namespace pufota
