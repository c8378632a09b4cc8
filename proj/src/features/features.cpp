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

#include "features/features.hpp"

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/lines.hpp"
#include "common/url.hpp"

namespace adcost {
namespace {

bool image_like_path(std::string_view path) {
  auto low = to_lower(path);
  return has_suffix(low, ".gif") || has_suffix(low, ".png") ||
         has_suffix(low, ".jpg") || low.find("pixel") != std::string::npos ||
         low.find("beacon") != std::string::npos ||
         low.find("1x1") != std::string::npos;
}

}  // namespace

void IabMap::add(std::string domain, std::string iab) {
  entries_[to_lower(domain)] = std::move(iab);
}

std::optional<std::string> IabMap::lookup(std::string_view host) const {
  std::string h = to_lower(host);
  auto it = entries_.find(h);
  if (it != entries_.end()) return it->second;
  it = entries_.find(registrable_domain(h));
  if (it != entries_.end()) return it->second;
  return std::nullopt;
}

IabMap IabMap::load_csv(const std::string& path) {
  LineReader reader(path);
  if (!reader.ok()) throw_config("FileNotFound", "cannot open iab map: " + path);
  IabMap m;
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
      throw_config("BadIabRow", "iab row needs domain,iab_code: " + line);
    m.add(fields[0], fields[1]);
  }
  return m;
}

InterestProfile infer_interests(const std::map<std::string, std::int64_t>& visited,
                                const IabMap& iab) {
  InterestProfile profile;
  std::map<std::string, std::int64_t> counts;
  std::int64_t total = 0;
  for (const auto& [host, n] : visited) {
    auto code = iab.lookup(host);
    if (!code) continue;
    counts[*code] += n;
    total += n;
  }
  if (total == 0) return profile;
  for (const auto& [code, n] : counts)
    profile.weights[code] = static_cast<double>(n) / static_cast<double>(total);
  return profile;
}

std::string ad_size_label(const std::optional<std::pair<int, int>>& size) {
  if (!size) return "other";
  return std::to_string(size->first) + "x" + std::to_string(size->second);
}

bool looks_like_sync_token(std::string_view value) {
  if (value.size() < 16) return false;
  bool letter = false, digit = false;
  for (char c : value) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'))
      letter = true;
    else if (c >= '0' && c <= '9')
      digit = true;
    else if (c != '-' && c != '_')
      return false;
  }
  return letter && digit;
}

std::int64_t detect_cookie_sync(const std::vector<HttpRequestRecord>& user_stream) {
  std::unordered_map<std::string, std::set<std::string>> token_domains;
  std::int64_t count = 0;
  for (const auto& rec : user_stream) {
    auto url = parse_url(rec.url);
    if (!url) continue;
    std::string domain = registrable_domain(url->host);
    for (const auto& [k, v] : url->params) {
      if (!looks_like_sync_token(v)) continue;
      auto& domains = token_domains[v];
      domains.insert(domain);
      if (domains.size() == 2) ++count;  // counted once, on the second domain
    }
  }
  return count;
}

CoreFeatures project(const FeatureVector& f) {
  CoreFeatures s;
  s.interaction = std::string(interaction_name(f.device.interaction));
  s.device_type = std::string(device_type_name(f.device.device_type));
  s.os = std::string(os_name(f.device.os));
  s.city = f.city.value_or("other");
  s.tod_bucket = f.tod_bucket;
  s.day_of_week = f.day_of_week;
  s.ad_size = ad_size_label(f.ad_size);
  s.publisher_iab = f.publisher_iab.value_or("other");
  s.adx_id = f.adx_id;
  s.hour_of_day = f.hour_of_day;
  return s;
}

std::optional<std::string> UserContext::resolve_city(
    const HttpRequestRecord& rec) const {
  if (rec.city) return rec.city;
  if (rec.client_ip && geo_) {
    if (auto c = geo_->lookup(*rec.client_ip)) return c;
  }
  return std::nullopt;
}

void UserContext::observe(const HttpRequestRecord& rec) {
  ++agg_.total_requests;
  agg_.total_bytes += rec.bytes_in + rec.bytes_out;
  agg_.total_duration_ms += rec.duration_ms;
  agg_.avg_bytes_per_request =
      static_cast<double>(agg_.total_bytes) / static_cast<double>(agg_.total_requests);
  agg_.avg_duration_per_request = static_cast<double>(agg_.total_duration_ms) /
                                  static_cast<double>(agg_.total_requests);

  auto url = parse_url(rec.url);
  if (!url) return;

  DomainCategory cat = bl_ ? bl_->classify(url->host) : DomainCategory::Rest;
  bool trackerish = cat == DomainCategory::Advertising || cat == DomainCategory::Analytics;

  if (trackerish) {
    ++ad_requests_;
    ad_bytes_ += rec.bytes_in + rec.bytes_out;
    ad_duration_ms_ += rec.duration_ms;
    if (rec.bytes_in <= 1024 && image_like_path(url->path)) ++agg_.beacon_count;
  } else {
    // Non-tracker hosts stand in for publisher pages.
    std::string domain = registrable_domain(url->host);
    publisher_domains_.insert(domain);
    agg_.publishers_visited = static_cast<std::int64_t>(publisher_domains_.size());
    ++visited_hosts_[url->host];
    last_publisher_host_ = url->host;
  }

  std::string domain = registrable_domain(url->host);
  for (const auto& [k, v] : url->params) {
    if (!looks_like_sync_token(v)) continue;
    auto& domains = token_domains_[v];
    domains.insert(domain);
    if (domains.size() == 2) ++agg_.cookie_sync_count;
  }

  if (auto city = resolve_city(rec)) {
    cities_.insert(*city);
    last_city_ = *city;
  }
}

FeatureVector UserContext::build_features(const PriceNotification& n,
                                          const HttpRequestRecord& rec) {
  FeatureVector f;

  CivilTime t = civil_from_epoch_ms(n.timestamp);
  f.hour_of_day = t.hour;
  f.tod_bucket = std::string(tod_bucket(t.hour));
  f.day_of_week = std::string(weekday_name(t.weekday));
  f.is_weekend = is_weekend(t);

  f.city = resolve_city(rec);
  if (!f.city) f.city = last_city_;

  f.device = parse_user_agent(rec.user_agent);
  f.interests = infer_interests(visited_hosts_, iab_ ? *iab_ : IabMap{});
  f.aggregates = agg_;
  f.unique_locations = static_cast<std::int64_t>(cities_.size());

  f.ad_size = n.ad_size;
  f.adx_id = n.adx_id;
  f.dsp_domain = n.dsp_domain;

  // Publisher identity comes from the page that fired the nURL: the
  // referer when present, else the user's last non-tracker page.
  std::optional<std::string> pub_host;
  if (rec.referer) {
    if (auto ref = parse_url(*rec.referer)) pub_host = ref->host;
  }
  if (!pub_host) pub_host = last_publisher_host_;
  if (pub_host && iab_) f.publisher_iab = iab_->lookup(*pub_host);

  // Popularity counts this user's notifications for the campaign,
  // including the current one; context stays partition-local.
  if (n.campaign_id) {
    f.campaign_popularity = ++campaign_counts_[*n.campaign_id];
  } else {
    f.campaign_popularity = 1;
  }

  if (auto url = parse_url(n.raw_url))
    f.url_param_count = static_cast<std::int64_t>(url->params.size());
  f.ad_requests = ad_requests_;
  f.ad_bytes = ad_bytes_;
  f.ad_duration_ms = ad_duration_ms_;
  return f;
}

}  // namespace adcost
