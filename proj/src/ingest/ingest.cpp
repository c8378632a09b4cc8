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

#include "ingest/ingest.hpp"

#include <algorithm>
#include <charconv>

#include <nlohmann/json.hpp>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/lines.hpp"
#include "common/url.hpp"

namespace adcost {
namespace {

using nlohmann::json;

std::optional<EpochMs> coerce_timestamp(const json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_unsigned()) return static_cast<std::int64_t>(v.get<std::uint64_t>());
  if (v.is_string()) return parse_rfc3339(v.get_ref<const std::string&>());
  return std::nullopt;
}

std::optional<EpochMs> coerce_timestamp_text(std::string_view s) {
  if (s.empty()) return std::nullopt;
  bool digits = true;
  for (char c : s) {
    if (c < '0' || c > '9') {
      digits = false;
      break;
    }
  }
  if (digits) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
    return std::nullopt;
  }
  return parse_rfc3339(s);
}

std::optional<std::int64_t> coerce_count_text(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

size_t label_count(std::string_view host) {
  return static_cast<size_t>(std::count(host.begin(), host.end(), '.')) + 1;
}

}  // namespace

std::string_view category_name(DomainCategory c) {
  switch (c) {
    case DomainCategory::Advertising: return "Advertising";
    case DomainCategory::Analytics: return "Analytics";
    case DomainCategory::Social: return "Social";
    case DomainCategory::ThirdPartyContent: return "ThirdPartyContent";
    case DomainCategory::Rest: return "Rest";
  }
  return "Rest";
}

std::optional<DomainCategory> category_from_name(std::string_view name) {
  if (name == "Advertising") return DomainCategory::Advertising;
  if (name == "Analytics") return DomainCategory::Analytics;
  if (name == "Social") return DomainCategory::Social;
  if (name == "ThirdPartyContent") return DomainCategory::ThirdPartyContent;
  if (name == "Rest") return DomainCategory::Rest;
  return std::nullopt;
}

void Blacklist::add(std::string suffix, DomainCategory cat) {
  std::string key = to_lower(suffix);
  if (key.empty()) throw_data("EmptySuffix", "blacklist suffix must be non-empty");
  if (entries_.count(key))
    throw_data("DuplicateSuffix", "duplicate blacklist suffix: " + key);
  max_labels_ = std::max(max_labels_, label_count(key));
  entries_.emplace(std::move(key), cat);
}

DomainCategory Blacklist::classify(std::string_view host) const {
  if (entries_.empty() || host.empty()) return DomainCategory::Rest;
  // Walk suffixes from the full host toward shorter ones; the first hit is
  // the longest match. Bounded by the longest registered suffix.
  std::string h = to_lower(host);
  std::string_view view = h;
  size_t labels = label_count(view);
  while (labels > max_labels_) {
    size_t dot = view.find('.');
    view.remove_prefix(dot + 1);
    --labels;
  }
  while (true) {
    auto it = entries_.find(std::string(view));
    if (it != entries_.end()) return it->second;
    size_t dot = view.find('.');
    if (dot == std::string_view::npos) break;
    view.remove_prefix(dot + 1);
  }
  return DomainCategory::Rest;
}

Blacklist Blacklist::load_csv(const std::string& path) {
  LineReader reader(path);
  if (!reader.ok()) throw_config("FileNotFound", "cannot open blacklist: " + path);
  Blacklist bl;
  std::string line;
  bool first = true;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (first) {
      first = false;
      if (fields.size() >= 2 && to_lower(fields[0]) == "domain") continue;
    }
    if (fields.size() < 2)
      throw_config("BadBlacklistRow", "blacklist row needs domain,category: " + line);
    auto cat = category_from_name(fields[1]);
    if (!cat)
      throw_config("UnknownCategory", "unknown blacklist category: " + fields[1]);
    bl.add(fields[0], *cat);
  }
  return bl;
}

std::optional<HttpRequestRecord> parse_record(std::string_view line, LogFormat format,
                                              ParseCounters& counters) {
  if (format == LogFormat::csv)
    throw_usage("CsvNeedsHeader", "CSV parsing requires parse_csv_record with a header");

  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    ++counters.skipped;
    return std::nullopt;
  }
  HttpRequestRecord rec;
  auto ts_it = j.find("ts");
  auto uid_it = j.find("uid");
  auto url_it = j.find("url");
  if (ts_it == j.end() || uid_it == j.end() || url_it == j.end() ||
      !uid_it->is_string() || !url_it->is_string()) {
    ++counters.skipped;
    return std::nullopt;
  }
  auto ts = coerce_timestamp(*ts_it);
  if (!ts) {
    ++counters.skipped;
    return std::nullopt;
  }
  rec.timestamp = *ts;
  rec.user_id = uid_it->get<std::string>();
  rec.url = url_it->get<std::string>();
  if (rec.user_id.empty() || rec.url.empty()) {
    ++counters.skipped;
    return std::nullopt;
  }

  if (auto it = j.find("ua"); it != j.end() && it->is_string())
    rec.user_agent = it->get<std::string>();
  if (auto it = j.find("referer"); it != j.end()) {
    if (it->is_string() && !it->get_ref<const std::string&>().empty())
      rec.referer = it->get<std::string>();
    else if (!it->is_null())
      ++counters.optional_dropped;
  }
  auto read_count = [&](const char* key, std::int64_t& dst) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (it->is_number_integer() && it->get<std::int64_t>() >= 0)
      dst = it->get<std::int64_t>();
    else if (it->is_number_unsigned())
      dst = static_cast<std::int64_t>(it->get<std::uint64_t>());
    else
      ++counters.optional_dropped;
  };
  read_count("bytes_out", rec.bytes_out);
  read_count("bytes_in", rec.bytes_in);
  read_count("duration_ms", rec.duration_ms);
  if (auto it = j.find("ip"); it != j.end()) {
    if (it->is_string() && !it->get_ref<const std::string&>().empty())
      rec.client_ip = it->get<std::string>();
    else if (!it->is_null())
      ++counters.optional_dropped;
  }
  if (auto it = j.find("city"); it != j.end()) {
    if (it->is_string() && !it->get_ref<const std::string&>().empty())
      rec.city = it->get<std::string>();
    else if (!it->is_null())
      ++counters.optional_dropped;
  }
  ++counters.parsed;
  return rec;
}

CsvHeader parse_csv_header(std::string_view line) {
  CsvHeader h;
  auto fields = split_csv_line(line);
  for (size_t i = 0; i < fields.size(); ++i) h.index[to_lower(fields[i])] = i;
  return h;
}

std::optional<HttpRequestRecord> parse_csv_record(std::string_view line,
                                                  const CsvHeader& header,
                                                  ParseCounters& counters) {
  auto fields = split_csv_line(line);
  auto get = [&](const char* name) -> std::optional<std::string_view> {
    auto it = header.index.find(name);
    if (it == header.index.end() || it->second >= fields.size()) return std::nullopt;
    return std::string_view(fields[it->second]);
  };

  auto ts_f = get("ts");
  auto uid_f = get("uid");
  auto url_f = get("url");
  if (!ts_f || !uid_f || !url_f || uid_f->empty() || url_f->empty()) {
    ++counters.skipped;
    return std::nullopt;
  }
  auto ts = coerce_timestamp_text(*ts_f);
  if (!ts) {
    ++counters.skipped;
    return std::nullopt;
  }
  HttpRequestRecord rec;
  rec.timestamp = *ts;
  rec.user_id = std::string(*uid_f);
  rec.url = std::string(*url_f);
  if (auto f = get("ua")) rec.user_agent = std::string(*f);
  if (auto f = get("referer"); f && !f->empty()) rec.referer = std::string(*f);
  auto read_count = [&](const char* name, std::int64_t& dst) {
    auto f = get(name);
    if (!f || f->empty()) return;
    if (auto v = coerce_count_text(*f))
      dst = *v;
    else
      ++counters.optional_dropped;
  };
  read_count("bytes_out", rec.bytes_out);
  read_count("bytes_in", rec.bytes_in);
  read_count("duration_ms", rec.duration_ms);
  if (auto f = get("ip"); f && !f->empty()) rec.client_ip = std::string(*f);
  if (auto f = get("city"); f && !f->empty()) rec.city = std::string(*f);
  ++counters.parsed;
  return rec;
}

DomainCategory classify_domain(std::string_view host, const Blacklist& bl) {
  return bl.classify(host);
}

std::unordered_map<std::string, std::vector<HttpRequestRecord>> partition_by_user(
    std::vector<HttpRequestRecord> records) {
  std::unordered_map<std::string, std::vector<HttpRequestRecord>> out;
  for (auto& rec : records) out[rec.user_id].push_back(std::move(rec));
  for (auto& [uid, stream] : out) {
    std::stable_sort(stream.begin(), stream.end(),
                     [](const HttpRequestRecord& a, const HttpRequestRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
  }
  return out;
}

std::string record_host(const HttpRequestRecord& rec) {
  auto u = parse_url(rec.url);
  return u ? u->host : std::string();
}

}  // namespace adcost
