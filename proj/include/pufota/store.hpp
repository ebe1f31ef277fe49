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
#include <vector>

#include "pufota/sim/actors.hpp"

namespace pufota::store {

// Firmware repository manifest
// ----------------------------
// JSON: {"format": "pufota-repo", "version": 1, "entries": [{"vendor_id",
// "device_type", "hw_revision", "sw_revision", "best_before", "release_ts",
// "payload", "sha256"}]}. Payload paths are relative to the manifest.
struct ManifestEntry {
  wire::FirmwareVersion fv;
  std::filesystem::path payload;
  std::string sha256;  // lowercase hex of the payload file
};

struct RepoManifest {
  std::vector<ManifestEntry> entries;

  // Per device key, sw_revision strictly increases in entry order. Throws
  // ConfigError.
  void validate() const;
};

std::string emit_manifest(const RepoManifest& manifest);
RepoManifest parse_manifest(std::string_view json);  // throws ConfigError

// Reads the manifest and every payload; a payload whose SHA-256 differs from
// its entry is refused. Throws IoError, ConfigError.
std::vector<sim::FirmwareImage> load_repo(const std::filesystem::path& manifest_path);

// Writes `fi` next to the manifest and appends an entry for it.
void add_release(const std::filesystem::path& manifest_path, const sim::FirmwareImage& image,
                 const std::string& payload_name);

// Model repository store
// ----------------------
// Text file: a "pufota-ppmr-store 1" header line, then one record per model:
//   record <byte-count> <sha256 hex of body>
//   <body: serialized model, then a "helper ..." or "helper none" line>
// and a closing "end <record-count>" line. Saving never drops or alters a
// record already in the file.
std::vector<sim::PpmrEntry> load_ppmr_store(const std::filesystem::path& path);
void save_ppmr_store(const std::vector<sim::PpmrEntry>& entries,
                     const std::filesystem::path& path);

std::string encode_ppmr_store(const std::vector<sim::PpmrEntry>& entries);
std::vector<sim::PpmrEntry> decode_ppmr_store(std::string_view text);  // throws DecodeError

}  // namespace pufota::store
