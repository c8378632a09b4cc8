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

#include "common/timeutil.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace adcost {
namespace {

// Howard Hinnant's days-from-civil; valid far beyond the epochs we handle.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool parse_fixed_int(std::string_view s, size_t pos, size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (size_t i = 0; i < len; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

CivilTime civil_from_epoch_ms(EpochMs ms) {
  const std::int64_t secs = floor_div(ms, 1000);
  const std::int64_t days = floor_div(secs, 86400);
  std::int64_t sod = secs - days * 86400;
  CivilTime t;
  civil_from_days(days, t.year, t.month, t.day);
  t.hour = static_cast<int>(sod / 3600);
  t.minute = static_cast<int>((sod % 3600) / 60);
  t.second = static_cast<int>(sod % 60);
  // 1970-01-01 was a Thursday; shift so Monday maps to 0.
  std::int64_t wd = (days + 3) % 7;
  if (wd < 0) wd += 7;
  t.weekday = static_cast<int>(wd);
  return t;
}

EpochMs epoch_ms_from_civil(int year, int month, int day, int hour, int minute,
                            int second) {
  const std::int64_t days = days_from_civil(year, month, day);
  return ((days * 86400) + hour * 3600 + minute * 60 + second) * 1000;
}

std::optional<EpochMs> parse_rfc3339(std::string_view s) {
  int y, mo, d, h, mi, se;
  if (!parse_fixed_int(s, 0, 4, y)) return std::nullopt;
  if (s.size() < 20 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!parse_fixed_int(s, 5, 2, mo) || !parse_fixed_int(s, 8, 2, d)) return std::nullopt;
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
  if (!parse_fixed_int(s, 11, 2, h) || s[13] != ':') return std::nullopt;
  if (!parse_fixed_int(s, 14, 2, mi) || s[16] != ':') return std::nullopt;
  if (!parse_fixed_int(s, 17, 2, se)) return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60)
    return std::nullopt;

  size_t pos = 19;
  std::int64_t frac_ms = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    size_t digits = 0;
    std::int64_t val = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 3) val = val * 10 + (s[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    while (digits < 3) {
      val *= 10;
      ++digits;
    }
    frac_ms = val;
  }
  if (pos >= s.size()) return std::nullopt;

  std::int64_t offset_sec = 0;
  char c = s[pos];
  if (c == 'Z' || c == 'z') {
    ++pos;
  } else if (c == '+' || c == '-') {
    int oh, om;
    if (!parse_fixed_int(s, pos + 1, 2, oh)) return std::nullopt;
    if (pos + 3 >= s.size() || s[pos + 3] != ':') return std::nullopt;
    if (!parse_fixed_int(s, pos + 4, 2, om)) return std::nullopt;
    if (oh > 23 || om > 59) return std::nullopt;
    offset_sec = oh * 3600 + om * 60;
    if (c == '-') offset_sec = -offset_sec;
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;

  EpochMs base = epoch_ms_from_civil(y, mo, d, h, mi, se == 60 ? 59 : se);
  if (se == 60) base += 1000;  // fold leap second forward
  return base + frac_ms - offset_sec * 1000;
}

std::string format_rfc3339(EpochMs ms) {
  CivilTime t = civil_from_epoch_ms(ms);
  std::int64_t frac = ms - floor_div(ms, 1000) * 1000;
  char buf[40];
  if (frac != 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                  t.year, t.month, t.day, t.hour, t.minute, t.second,
                  static_cast<int>(frac));
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", t.year,
                  t.month, t.day, t.hour, t.minute, t.second);
  }
  return buf;
}

std::string_view tod_bucket(int hour) {
  if (hour < 9) return "12am-9am";
  if (hour < 18) return "9am-6pm";
  return "6pm-12am";
}

std::string_view weekday_name(int weekday) {
  static constexpr std::array<std::string_view, 7> kNames = {
      "mon", "tue", "wed", "thu", "fri", "sat", "sun"};
  if (weekday < 0 || weekday > 6) return "mon";
  return kNames[static_cast<size_t>(weekday)];
}

}  // namespace adcost
