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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "features/geo.hpp"
#include "features/ua.hpp"
#include "ingest/ingest.hpp"
#include "nurl/nurl.hpp"

namespace adcost {

// domain -> IAB code ("IAB1".."IAB26"); exact host first, then the
// registrable domain.
class IabMap {
 public:
  void add(std::string domain, std::string iab);
  std::optional<std::string> lookup(std::string_view host) const;
  size_t size() const { return entries_.size(); }

  // CSV `domain,iab_code`, optional header row.
  static IabMap load_csv(const std::string& path);

 private:
  std::unordered_map<std::string, std::string> entries_;
};

struct InterestProfile {
  std::map<std::string, double> weights;  // IAB -> share, sums to 1 when non-empty
  bool empty() const { return weights.empty(); }
};

// visited: host -> visit count. Unmapped hosts are ignored; a profile with
// no mapped visit comes back empty (the EmptyProfile signal).
InterestProfile infer_interests(const std::map<std::string, std::int64_t>& visited,
                                const IabMap& iab);

struct UserAggregates {
  std::int64_t beacon_count = 0;
  std::int64_t cookie_sync_count = 0;
  std::int64_t publishers_visited = 0;
  std::int64_t total_bytes = 0;
  std::int64_t total_requests = 0;
  double avg_bytes_per_request = 0;
  std::int64_t total_duration_ms = 0;
  double avg_duration_per_request = 0;
};

struct FeatureVector {
  // geo-temporal
  std::optional<std::string> city;
  int hour_of_day = 0;
  std::string tod_bucket;
  std::string day_of_week;
  bool is_weekend = false;
  // user
  DeviceProfile device;
  InterestProfile interests;
  UserAggregates aggregates;
  std::int64_t unique_locations = 0;
  // ad
  std::optional<std::pair<int, int>> ad_size;
  std::string adx_id;
  std::optional<std::string> dsp_domain;
  std::optional<std::string> publisher_iab;
  std::int64_t campaign_popularity = 0;
  std::int64_t url_param_count = 0;
  std::int64_t ad_requests = 0;
  std::int64_t ad_bytes = 0;
  std::int64_t ad_duration_ms = 0;
};

// The model's input. Categorical domains are closed: anything unknown or
// missing is the explicit "other" level.
struct CoreFeatures {
  std::string interaction;
  std::string device_type;
  std::string os;
  std::string city;
  std::string tod_bucket;
  std::string day_of_week;
  std::string ad_size;        // "300x250" style, or "other"
  std::string publisher_iab;  // "IAB12" style, or "other"
  std::string adx_id;
  int hour_of_day = 0;

  bool operator==(const CoreFeatures&) const = default;
};

CoreFeatures project(const FeatureVector& f);

std::string ad_size_label(const std::optional<std::pair<int, int>>& size);

// Count of identifier-like query values (length >= 16, letters and digits
// from the base64url charset) seen on two or more distinct registrable
// domains. Standalone variant for a whole stream; the context tracks the
// same quantity incrementally.
std::int64_t detect_cookie_sync(const std::vector<HttpRequestRecord>& user_stream);

bool looks_like_sync_token(std::string_view value);

// Per-user running history. Feed records in time order via observe();
// for a notification record call build_features() BEFORE observe() so the
// feature vector only sees strictly earlier traffic (plus the notification
// itself for campaign popularity).
class UserContext {
 public:
  UserContext(const Blacklist* bl, const GeoTable* geo, const IabMap* iab)
      : bl_(bl), geo_(geo), iab_(iab) {}

  void observe(const HttpRequestRecord& rec);

  FeatureVector build_features(const PriceNotification& n,
                               const HttpRequestRecord& rec);

  const UserAggregates& aggregates() const { return agg_; }

 private:
  std::optional<std::string> resolve_city(const HttpRequestRecord& rec) const;

  const Blacklist* bl_;
  const GeoTable* geo_;
  const IabMap* iab_;

  UserAggregates agg_;
  std::set<std::string> publisher_domains_;
  std::set<std::string> cities_;
  std::map<std::string, std::int64_t> visited_hosts_;
  std::unordered_map<std::string, std::set<std::string>> token_domains_;
  std::unordered_map<std::string, std::int64_t> campaign_counts_;
  std::optional<std::string> last_city_;
  std::optional<std::string> last_publisher_host_;
  std::int64_t ad_requests_ = 0;
  std::int64_t ad_bytes_ = 0;
  std::int64_t ad_duration_ms_ = 0;
};

}  // namespace adcost
