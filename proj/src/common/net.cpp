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

#include "common/net.hpp"

#include <arpa/inet.h>

#include <cstring>
#include <string>

namespace adcost {

std::optional<IpAddr> parse_ip(std::string_view text) {
  std::string z(text);
  IpAddr out;
  in_addr a4{};
  if (inet_pton(AF_INET, z.c_str(), &a4) == 1) {
    out.v4 = true;
    out.bytes[10] = 0xff;
    out.bytes[11] = 0xff;
    std::memcpy(out.bytes.data() + 12, &a4, 4);
    return out;
  }
  in6_addr a6{};
  if (inet_pton(AF_INET6, z.c_str(), &a6) == 1) {
    out.v4 = false;
    std::memcpy(out.bytes.data(), &a6, 16);
    return out;
  }
  return std::nullopt;
}

bool ip_in_prefix(const IpAddr& addr, const IpAddr& net, int prefix_len) {
  if (addr.v4 != net.v4) return false;
  int offset_bits = addr.v4 ? 96 : 0;
  int bits = prefix_len + offset_bits;
  if (bits < 0 || bits > 128) return false;
  int full = bits / 8;
  int rem = bits % 8;
  if (std::memcmp(addr.bytes.data(), net.bytes.data(), static_cast<size_t>(full)) != 0)
    return false;
  if (rem == 0) return true;
  std::uint8_t mask = static_cast<std::uint8_t>(0xff << (8 - rem));
  return (addr.bytes[static_cast<size_t>(full)] & mask) ==
         (net.bytes[static_cast<size_t>(full)] & mask);
}

}  // namespace adcost
