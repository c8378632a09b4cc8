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

#include "common/money.hpp"

#include <cmath>
#include <cstdlib>

namespace adcost {

std::optional<MicroCpm> parse_cpm(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_digit = false;
  bool seen_dot = false;
  bool round_up = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    seen_digit = true;
    int d = c - '0';
    if (!seen_dot) {
      if (whole > (INT64_MAX - d) / 10) return std::nullopt;
      whole = whole * 10 + d;
    } else if (frac_digits < 6) {
      frac = frac * 10 + d;
      ++frac_digits;
    } else if (frac_digits == 6) {
      // 7th fractional digit decides rounding; the rest is dropped.
      round_up = d >= 5;
      ++frac_digits;
    }
  }
  if (!seen_digit) return std::nullopt;
  while (frac_digits < 6) {
    frac *= 10;
    ++frac_digits;
  }
  if (whole > (INT64_MAX - frac) / kMicrosPerCpm) return std::nullopt;
  MicroCpm v = whole * kMicrosPerCpm + frac;
  if (round_up) ++v;
  return v;
}

std::string format_cpm(MicroCpm micros) {
  bool neg = micros < 0;
  std::uint64_t abs = neg ? static_cast<std::uint64_t>(-(micros + 1)) + 1
                          : static_cast<std::uint64_t>(micros);
  std::uint64_t whole = abs / kMicrosPerCpm;
  std::uint64_t frac = abs % kMicrosPerCpm;
  std::string out;
  if (neg) out.push_back('-');
  out += std::to_string(whole);
  if (frac != 0) {
    std::string f = std::to_string(frac);
    f.insert(f.begin(), 6 - f.size(), '0');
    while (f.back() == '0') f.pop_back();
    out.push_back('.');
    out += f;
  }
  return out;
}

MicroCpm cpm_from_double(double cpm) {
  return static_cast<MicroCpm>(std::llround(cpm * static_cast<double>(kMicrosPerCpm)));
}

}  // namespace adcost
