// Copyright 2026 The adcost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace adcost {

std::string crc32_hex(std::string_view bytes);  // 8 lowercase hex digits

struct ModelManifestEntry {
  int version = 0;
  std::int64_t created_at = 0;
  std::string checksum;         // crc32 of the stored file bytes
  std::string training_digest;  // crc32 of the model's training_meta
  std::string file;             // relative to the store directory
};

// Directory of immutable model files plus manifest.json. Versions are
// assigned by publish() and only ever grow.
class ModelStore {
 public:
  explicit ModelStore(std::string dir);

  // Writes model_vN.json and re-writes the manifest; returns N.
  int publish(const std::string& model_json, std::int64_t created_at = 0);

  std::optional<ModelManifestEntry> latest() const;
  std::optional<ModelManifestEntry> entry(int version) const;
  const std::vector<ModelManifestEntry>& entries() const { return entries_; }

  // Throws Error(Data, "ChecksumMismatch") when the file was tampered with.
  std::string read_bytes(const ModelManifestEntry& e) const;

  void reload();

 private:
  void save() const;

  std::string dir_;
  std::vector<ModelManifestEntry> entries_;
};

struct ServiceConfig {
  std::string store_dir;
  std::string contributions_path;
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks any free port
};

// HTTP endpoint: GET /model/latest, GET /model/{version}, POST /contribute.
class ModelService {
 public:
  explicit ModelService(ServiceConfig cfg);
  ~ModelService();
  ModelService(const ModelService&) = delete;
  ModelService& operator=(const ModelService&) = delete;

  // Binds and serves on a background thread. Throws Error(Config,
  // "BindFailed") when the address is unavailable.
  void start();
  void wait_ready() const;
  int port() const { return port_; }
  void stop();

 private:
  struct Impl;
  ServiceConfig cfg_;
  int port_ = 0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace adcost
