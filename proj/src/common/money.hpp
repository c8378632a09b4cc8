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

// CPM amounts are held as integer micro-CPM (1 CPM == 1'000'000 micros) so
// that sums are exact and independent of accumulation order.
using MicroCpm = std::int64_t;

inline constexpr MicroCpm kMicrosPerCpm = 1'000'000;

// Parses a plain decimal ("0.95", "12", ".5") into micro-CPM. Rejects signs,
// exponents and anything else. Fractions beyond 6 digits round half away
// from zero. Returns nullopt on malformed input.
std::optional<MicroCpm> parse_cpm(std::string_view text);

// Shortest decimal rendering, exact: format_cpm(parse_cpm(s)) round-trips.
std::string format_cpm(MicroCpm micros);

inline double cpm_to_double(MicroCpm micros) {
  return static_cast<double>(micros) / static_cast<double>(kMicrosPerCpm);
}

MicroCpm cpm_from_double(double cpm);

}  // namespace adcost
