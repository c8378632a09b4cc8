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

#include "service/service.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <zlib.h>

#include "common/error.hpp"
#include "service/contribution.hpp"

namespace adcost {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string crc32_hex(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()),
              static_cast<uInt>(bytes.size()));
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw_data("FileNotFound", "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ModelStore::ModelStore(std::string dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  reload();
}

void ModelStore::reload() {
  entries_.clear();
  fs::path manifest = fs::path(dir_) / "manifest.json";
  if (!fs::exists(manifest)) return;
  json doc = json::parse(read_file(manifest), nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("models") ||
      !doc["models"].is_array()) {
    throw_data("BadManifest", "manifest.json is malformed");
  }
  int prev = 0;
  for (const auto& m : doc["models"]) {
    ModelManifestEntry e;
    e.version = m.value("version", 0);
    e.created_at = m.value("created_at", std::int64_t{0});
    e.checksum = m.value("checksum", std::string());
    e.training_digest = m.value("training_digest", std::string());
    e.file = m.value("file", std::string());
    if (e.version <= prev || e.file.empty()) {
      throw_data("BadManifest", "manifest versions must strictly increase");
    }
    prev = e.version;
    entries_.push_back(std::move(e));
  }
}

void ModelStore::save() const {
  ordered_json doc;
  doc["schema_version"] = 1;
  ordered_json models = ordered_json::array();
  for (const auto& e : entries_) {
    ordered_json m;
    m["version"] = e.version;
    m["created_at"] = e.created_at;
    m["checksum"] = e.checksum;
    m["training_digest"] = e.training_digest;
    m["file"] = e.file;
    models.push_back(m);
  }
  doc["models"] = models;
  fs::path tmp = fs::path(dir_) / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << doc.dump(2) << '\n';
  }
  fs::rename(tmp, fs::path(dir_) / "manifest.json");
}

int ModelStore::publish(const std::string& model_json, std::int64_t created_at) {
  int version = entries_.empty() ? 1 : entries_.back().version + 1;
  ModelManifestEntry e;
  e.version = version;
  e.created_at = created_at;
  e.checksum = crc32_hex(model_json);
  e.file = "model_v" + std::to_string(version) + ".json";

  json doc = json::parse(model_json, nullptr, false);
  if (!doc.is_discarded() && doc.is_object() && doc.contains("training_meta")) {
    e.training_digest = crc32_hex(doc["training_meta"].dump());
  } else {
    e.training_digest = crc32_hex("");
  }

  std::ofstream out(fs::path(dir_) / e.file, std::ios::binary);
  if (!out) throw_data("WriteFailed", "cannot write model file");
  out << model_json;
  out.close();
  entries_.push_back(e);
  save();
  return version;
}

std::optional<ModelManifestEntry> ModelStore::latest() const {
  if (entries_.empty()) return std::nullopt;
  return entries_.back();
}

std::optional<ModelManifestEntry> ModelStore::entry(int version) const {
  for (const auto& e : entries_) {
    if (e.version == version) return e;
  }
  return std::nullopt;
}

std::string ModelStore::read_bytes(const ModelManifestEntry& e) const {
  std::string bytes = read_file(fs::path(dir_) / e.file);
  if (crc32_hex(bytes) != e.checksum) {
    throw_data("ChecksumMismatch", "stored model does not match its manifest checksum");
  }
  return bytes;
}

struct ModelService::Impl {
  httplib::Server server;
  std::thread thread;
  std::mutex contrib_mu;
};

ModelService::ModelService(ServiceConfig cfg)
    : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>()) {}

ModelService::~ModelService() { stop(); }

void ModelService::start() {
  auto& svr = impl_->server;

  auto serve_entry = [this](const ModelManifestEntry& e, httplib::Response& res) {
    ModelStore store(cfg_.store_dir);
    std::string bytes = store.read_bytes(e);
    res.set_header("X-Model-Version", std::to_string(e.version));
    res.set_header("X-Model-Checksum", e.checksum);
    res.set_content(bytes, "application/json");
  };

  svr.Get("/model/latest", [this, serve_entry](const httplib::Request&,
                                               httplib::Response& res) {
    ModelStore store(cfg_.store_dir);
    auto e = store.latest();
    if (!e) {
      res.status = 503;
      res.set_content("{\"error\":\"NoModel\"}", "application/json");
      return;
    }
    serve_entry(*e, res);
  });

  svr.Get(R"(/model/(\d+))", [this, serve_entry](const httplib::Request& req,
                                                 httplib::Response& res) {
    ModelStore store(cfg_.store_dir);
    int version = 0;
    try {
      version = std::stoi(req.matches[1].str());
    } catch (...) {
      version = 0;
    }
    auto e = store.entry(version);
    if (!e) {
      res.status = 404;
      res.set_content("{\"error\":\"UnknownVersion\"}", "application/json");
      return;
    }
    serve_entry(*e, res);
  });

  svr.Post("/contribute", [this](const httplib::Request& req, httplib::Response& res) {
    json doc = json::parse(req.body, nullptr, false);
    std::optional<Contribution> c;
    if (!doc.is_discarded()) c = parse_contribution(doc);
    if (!c) {
      res.status = 400;
      res.set_content("{\"error\":\"BadContribution\"}", "application/json");
      return;
    }
    {
      std::lock_guard<std::mutex> lock(impl_->contrib_mu);
      std::ofstream out(cfg_.contributions_path, std::ios::binary | std::ios::app);
      if (!out) {
        res.status = 500;
        res.set_content("{\"error\":\"StoreUnavailable\"}", "application/json");
        return;
      }
      out << contribution_line(*c) << '\n';
    }
    res.status = 202;
    res.set_content("{\"status\":\"accepted\"}", "application/json");
  });

  if (cfg_.port == 0) {
    port_ = svr.bind_to_any_port(cfg_.host);
    if (port_ <= 0) throw_config("BindFailed", "cannot bind " + cfg_.host);
  } else {
    if (!svr.bind_to_port(cfg_.host, cfg_.port)) {
      throw_config("BindFailed",
                   "cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
    }
    port_ = cfg_.port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  svr.wait_until_ready();
}

void ModelService::wait_ready() const { impl_->server.wait_until_ready(); }

void ModelService::stop() {
  if (impl_ && impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

}  // namespace adcost
