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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "common/timeutil.hpp"

namespace adcost {

struct HttpRequestRecord {
  EpochMs timestamp = 0;
  std::string user_id;
  std::string url;
  std::string user_agent;
  std::optional<std::string> referer;
  std::int64_t bytes_out = 0;
  std::int64_t bytes_in = 0;
  std::int64_t duration_ms = 0;
  std::optional<std::string> client_ip;
  std::optional<std::string> city;
};

enum class DomainCategory { Advertising, Analytics, Social, ThirdPartyContent, Rest };

std::string_view category_name(DomainCategory c);
std::optional<DomainCategory> category_from_name(std::string_view name);

// Suffix-keyed category list; lookup picks the longest registered suffix
// that matches on a label boundary.
class Blacklist {
 public:
  // Throws Error(Data, "DuplicateSuffix") on duplicates and
  // Error(Config, "UnknownCategory") on a bad category name.
  void add(std::string suffix, DomainCategory cat);

  DomainCategory classify(std::string_view host) const;

  size_t size() const { return entries_.size(); }

  // CSV file `domain,category`, optional header row.
  static Blacklist load_csv(const std::string& path);

 private:
  std::unordered_map<std::string, DomainCategory> entries_;
  size_t max_labels_ = 0;
};

enum class LogFormat { json_lines, csv };

struct ParseCounters {
  std::uint64_t parsed = 0;
  std::uint64_t skipped = 0;
  std::uint64_t optional_dropped = 0;
};

// JSONL field names: ts, uid, url, ua, referer, bytes_out, bytes_in,
// duration_ms, ip, city. CSV uses the same names in its header row.
// Returns nullopt for malformed records (missing url/uid/ts); counters
// keep parsed + skipped equal to the number of input lines.
std::optional<HttpRequestRecord> parse_record(std::string_view line, LogFormat format,
                                              ParseCounters& counters);

// Binds a CSV header row to record fields for subsequent parse calls.
struct CsvHeader {
  std::unordered_map<std::string, size_t> index;
};
CsvHeader parse_csv_header(std::string_view line);
std::optional<HttpRequestRecord> parse_csv_record(std::string_view line,
                                                  const CsvHeader& header,
                                                  ParseCounters& counters);

DomainCategory classify_domain(std::string_view host, const Blacklist& bl);

// Groups by user, preserving per-user timestamp order (stable for ties).
std::unordered_map<std::string, std::vector<HttpRequestRecord>> partition_by_user(
    std::vector<HttpRequestRecord> records);

// Host component of a record's URL, empty when the URL does not parse.
std::string record_host(const HttpRequestRecord& rec);

}  // namespace adcost
