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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace adcost {

// Both families are normalized into a 16-byte value; IPv4 occupies the
// low 4 bytes of an IPv4-mapped layout so prefix math is uniform.
struct IpAddr {
  std::array<std::uint8_t, 16> bytes{};
  bool v4 = false;

  bool operator==(const IpAddr&) const = default;
};

std::optional<IpAddr> parse_ip(std::string_view text);

// True when the first `prefix_len` bits of addr equal those of net.
// prefix_len counts bits within the family (0..32 for v4, 0..128 for v6).
bool ip_in_prefix(const IpAddr& addr, const IpAddr& net, int prefix_len);

}  // namespace adcost
