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

namespace adcost {

using EpochMs = std::int64_t;

// Calendar fields are always derived in UTC.
struct CivilTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;   // 0..23
  int minute = 0;
  int second = 0;
  int weekday = 0;  // 0 = Monday .. 6 = Sunday
};

CivilTime civil_from_epoch_ms(EpochMs ms);
EpochMs epoch_ms_from_civil(int year, int month, int day, int hour, int minute,
                            int second);

// Accepts "2015-05-15T08:10:00Z", an optional fractional second part and
// numeric offsets ("+02:00"). Returns nullopt on malformed input.
std::optional<EpochMs> parse_rfc3339(std::string_view text);

std::string format_rfc3339(EpochMs ms);

inline bool is_weekend(const CivilTime& t) { return t.weekday >= 5; }

// Bucket labels follow the campaign-filter convention.
std::string_view tod_bucket(int hour);          // "12am-9am" | "9am-6pm" | "6pm-12am"
std::string_view weekday_name(int weekday);     // "mon".."sun"

}  // namespace adcost
