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

#include "features/feature_json.hpp"

#include <array>
#include <string_view>

namespace adcost {

namespace {

constexpr std::array<std::string_view, 9> kStringKeys = {
    "interaction", "device_type", "os",           "city",  "tod_bucket",
    "day_of_week", "ad_size",     "publisher_iab", "adx_id"};

}  // namespace

nlohmann::ordered_json features_to_json(const CoreFeatures& s) {
  nlohmann::ordered_json j;
  j["interaction"] = s.interaction;
  j["device_type"] = s.device_type;
  j["os"] = s.os;
  j["city"] = s.city;
  j["tod_bucket"] = s.tod_bucket;
  j["day_of_week"] = s.day_of_week;
  j["ad_size"] = s.ad_size;
  j["publisher_iab"] = s.publisher_iab;
  j["adx_id"] = s.adx_id;
  j["hour_of_day"] = s.hour_of_day;
  return j;
}

std::optional<CoreFeatures> features_from_json(const nlohmann::json& j, bool strict) {
  if (!j.is_object()) return std::nullopt;
  for (auto key : kStringKeys) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) return std::nullopt;
  }
  auto hour = j.find("hour_of_day");
  if (hour == j.end() || !hour->is_number_integer()) return std::nullopt;
  int h = hour->get<int>();
  if (h < 0 || h > 23) return std::nullopt;
  if (strict && j.size() != kStringKeys.size() + 1) return std::nullopt;

  CoreFeatures s;
  s.interaction = j["interaction"].get<std::string>();
  s.device_type = j["device_type"].get<std::string>();
  s.os = j["os"].get<std::string>();
  s.city = j["city"].get<std::string>();
  s.tod_bucket = j["tod_bucket"].get<std::string>();
  s.day_of_week = j["day_of_week"].get<std::string>();
  s.ad_size = j["ad_size"].get<std::string>();
  s.publisher_iab = j["publisher_iab"].get<std::string>();
  s.adx_id = j["adx_id"].get<std::string>();
  s.hour_of_day = h;
  return s;
}

}  // namespace adcost
