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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "common/net.hpp"

namespace adcost {

// CIDR -> city table with most-specific-prefix lookup. One hash map per
// registered prefix length keeps lookup cost bounded by the number of
// distinct lengths, not entries.
class GeoTable {
 public:
  // cidr like "10.0.0.0/8" or "2001:db8::/32".
  void add(std::string_view cidr, std::string city);

  std::optional<std::string> lookup(const IpAddr& ip) const;
  std::optional<std::string> lookup(std::string_view ip_text) const;

  size_t size() const;
  bool empty() const { return size() == 0; }

  // CSV `cidr,city`, optional header row.
  static GeoTable load_csv(const std::string& path);

 private:
  // key: family flag byte + masked address bytes
  std::map<int, std::unordered_map<std::string, std::string>, std::greater<int>>
      by_len_[2];
};

}  // namespace adcost
