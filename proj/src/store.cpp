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

#include "pufota/store.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pufota/crypto/hash.hpp"
#include "pufota/error.hpp"

namespace pufota::store {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr std::string_view kStoreHeader = "pufota-ppmr-store 1";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file so a crash never leaves half a file.
void write_file(const fs::path& path, std::string_view data) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out.flush()) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

std::string sha256_hex(std::string_view data) {
  return to_hex(crypto::digest(crypto::HashAlgorithm::sha256, as_bytes(data)));
}

std::string record_body(const sim::PpmrEntry& e) {
  std::string body = dppuf::serialize_model(e.model);
  if (body.empty() || body.back() != '\n') body += '\n';
  body += e.helper ? "helper " + fuzzy::serialize_helper(*e.helper) : std::string("helper none");
  body += '\n';
  return body;
}

}  // namespace

void RepoManifest::validate() const {
  std::map<wire::DeviceKey, std::uint32_t> last;
  for (const auto& e : entries) {
    auto [it, fresh] = last.try_emplace(e.fv.key(), e.fv.sw_revision);
    if (!fresh) {
      if (e.fv.sw_revision <= it->second) {
        throw ConfigError("sw_revision " + std::to_string(e.fv.sw_revision) +
                          " does not increase for its device key");
      }
      it->second = e.fv.sw_revision;
    }
    if (e.fv.best_before <= e.fv.release_ts) {
      throw ConfigError("best_before must be later than release_ts");
    }
  }
}

std::string emit_manifest(const RepoManifest& m) {
  Json j;
  j["format"] = "pufota-repo";
  j["version"] = 1;
  j["entries"] = Json::array();
  for (const auto& e : m.entries) {
    j["entries"].push_back({{"vendor_id", e.fv.vendor_id},
                            {"device_type", e.fv.device_type},
                            {"hw_revision", e.fv.hw_revision},
                            {"sw_revision", e.fv.sw_revision},
                            {"best_before", e.fv.best_before},
                            {"release_ts", e.fv.release_ts},
                            {"payload", e.payload.generic_string()},
                            {"sha256", e.sha256}});
  }
  return j.dump(2) + "\n";
}

RepoManifest parse_manifest(std::string_view text) {
  RepoManifest m;
  try {
    const Json j = Json::parse(text);
    if (j.at("format") != "pufota-repo") throw ConfigError("not a firmware manifest");
    if (j.at("version") != 1) throw ConfigError("unsupported manifest version");
    for (const auto& e : j.at("entries")) {
      ManifestEntry me;
      me.fv.vendor_id = e.at("vendor_id").get<std::uint16_t>();
      me.fv.device_type = e.at("device_type").get<std::uint16_t>();
      me.fv.hw_revision = e.at("hw_revision").get<std::uint8_t>();
      me.fv.sw_revision = e.at("sw_revision").get<std::uint32_t>();
      me.fv.best_before = e.at("best_before").get<std::uint64_t>();
      me.fv.release_ts = e.at("release_ts").get<std::uint64_t>();
      me.payload = e.at("payload").get<std::string>();
      me.sha256 = e.at("sha256").get<std::string>();
      m.entries.push_back(std::move(me));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  m.validate();
  return m;
}

std::vector<sim::FirmwareImage> load_repo(const fs::path& manifest_path) {
  const RepoManifest m = parse_manifest(read_file(manifest_path));
  std::vector<sim::FirmwareImage> images;
  for (const auto& e : m.entries) {
    const std::string data = read_file(manifest_path.parent_path() / e.payload);
    if (sha256_hex(data) != e.sha256) {
      throw ConfigError("payload " + e.payload.string() + " does not match its manifest hash");
    }
    images.push_back({Bytes(data.begin(), data.end()), e.fv});
  }
  return images;
}

void add_release(const fs::path& manifest_path, const sim::FirmwareImage& image,
                 const std::string& payload_name) {
  RepoManifest m;
  if (fs::exists(manifest_path)) m = parse_manifest(read_file(manifest_path));
  const std::string_view data(reinterpret_cast<const char*>(image.fi.data()), image.fi.size());
  m.entries.push_back({image.fv, payload_name, sha256_hex(data)});
  m.validate();
  write_file(manifest_path.parent_path() / payload_name, data);
  write_file(manifest_path, emit_manifest(m));
}

std::string encode_ppmr_store(const std::vector<sim::PpmrEntry>& entries) {
  std::string out(kStoreHeader);
  out += '\n';
  for (const auto& e : entries) {
    const std::string body = record_body(e);
    out += "record " + std::to_string(body.size()) + " " + sha256_hex(body) + "\n" + body;
  }
  out += "end " + std::to_string(entries.size()) + "\n";
  return out;
}

std::vector<sim::PpmrEntry> decode_ppmr_store(std::string_view text) {
  auto line_at = [&](std::size_t& pos) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) throw DecodeError("model store is truncated");
    const std::string_view l = text.substr(pos, nl - pos);
    pos = nl + 1;
    return l;
  };
  std::size_t pos = 0;
  if (line_at(pos) != kStoreHeader) throw DecodeError("not a model store or unsupported version");
  std::vector<sim::PpmrEntry> entries;
  std::map<InstanceId, bool> seen;
  for (;;) {
    const std::string_view l = line_at(pos);
    std::istringstream hdr{std::string(l)};
    std::string tag, digest;
    std::size_t n = 0;
    if (l.starts_with("end ")) {
      hdr >> tag >> n;
      if (!hdr || n != entries.size()) throw DecodeError("model store record count mismatch");
      if (pos != text.size()) throw DecodeError("trailing data after model store end");
      return entries;
    }
    hdr >> tag >> n >> digest;
    if (tag != "record" || !hdr) throw DecodeError("bad model store record header");
    if (text.size() - pos < n) throw DecodeError("model store is truncated");
    const std::string_view body = text.substr(pos, n);
    pos += n;
    if (sha256_hex(body) != digest) throw DecodeError("model store record digest mismatch");
    const auto split = body.rfind("helper ");
    if (split == std::string_view::npos) throw DecodeError("model store record lacks helper line");
    sim::PpmrEntry e;
    try {
      e.model = dppuf::parse_model(body.substr(0, split));
      std::string_view helper = body.substr(split + 7);
      if (!helper.empty() && helper.back() == '\n') helper.remove_suffix(1);
      if (helper != "none") e.helper = fuzzy::parse_helper(helper);
    } catch (const ConfigError& err) {
      throw DecodeError(std::string("bad model store record: ") + err.what());
    }
    if (seen[e.model.id]) throw DecodeError("duplicate model id in store");
    seen[e.model.id] = true;
    entries.push_back(std::move(e));
  }
}

std::vector<sim::PpmrEntry> load_ppmr_store(const fs::path& path) {
  return decode_ppmr_store(read_file(path));
}

void save_ppmr_store(const std::vector<sim::PpmrEntry>& entries, const fs::path& path) {
  std::vector<sim::PpmrEntry> merged;
  if (fs::exists(path)) {
    merged = load_ppmr_store(path);
    for (const auto& old : merged) {
      auto it = std::find_if(entries.begin(), entries.end(),
                             [&](const auto& e) { return e.model.id == old.model.id; });
      if (it == entries.end() || !(it->model == old.model) || it->helper != old.helper) {
        throw IoError("model store is append-only; record " + to_hex(old.model.id) +
                      " would be dropped or changed");
      }
    }
  }
  for (const auto& e : entries) {
    const bool present = std::any_of(merged.begin(), merged.end(),
                                     [&](const auto& m) { return m.model.id == e.model.id; });
    if (!present) merged.push_back(e);
  }
  write_file(path, encode_ppmr_store(merged));
}

}  // namespace pufota::store
