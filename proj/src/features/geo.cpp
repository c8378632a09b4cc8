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

#include "features/geo.hpp"

#include <charconv>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/lines.hpp"
#include "common/url.hpp"

namespace adcost {
namespace {

std::string masked_key(const IpAddr& ip, int prefix_len) {
  int offset = ip.v4 ? 96 : 0;
  int bits = prefix_len + offset;
  std::string key(17, '\0');
  key[0] = ip.v4 ? 1 : 0;
  int full = bits / 8;
  int rem = bits % 8;
  for (int i = 0; i < full; ++i) key[static_cast<size_t>(1 + i)] = static_cast<char>(ip.bytes[static_cast<size_t>(i)]);
  if (rem != 0) {
    std::uint8_t mask = static_cast<std::uint8_t>(0xff << (8 - rem));
    key[static_cast<size_t>(1 + full)] = static_cast<char>(ip.bytes[static_cast<size_t>(full)] & mask);
  }
  return key;
}

}  // namespace

void GeoTable::add(std::string_view cidr, std::string city) {
  size_t slash = cidr.find('/');
  if (slash == std::string_view::npos)
    throw_config("BadCidr", "missing prefix length: " + std::string(cidr));
  auto net = parse_ip(cidr.substr(0, slash));
  if (!net) throw_config("BadCidr", "bad network address: " + std::string(cidr));
  std::string_view len_text = cidr.substr(slash + 1);
  int len = -1;
  auto [p, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
  int max_len = net->v4 ? 32 : 128;
  if (ec != std::errc() || p != len_text.data() + len_text.size() || len < 0 ||
      len > max_len)
    throw_config("BadCidr", "bad prefix length: " + std::string(cidr));
  by_len_[net->v4 ? 1 : 0][len][masked_key(*net, len)] = std::move(city);
}

std::optional<std::string> GeoTable::lookup(const IpAddr& ip) const {
  const auto& maps = by_len_[ip.v4 ? 1 : 0];
  for (const auto& [len, table] : maps) {
    auto it = table.find(masked_key(ip, len));
    if (it != table.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<std::string> GeoTable::lookup(std::string_view ip_text) const {
  auto ip = parse_ip(ip_text);
  if (!ip) return std::nullopt;
  return lookup(*ip);
}

size_t GeoTable::size() const {
  size_t n = 0;
  for (const auto& maps : by_len_)
    for (const auto& [len, table] : maps) n += table.size();
  return n;
}

GeoTable GeoTable::load_csv(const std::string& path) {
  LineReader reader(path);
  if (!reader.ok()) throw_config("FileNotFound", "cannot open geo table: " + path);
  GeoTable t;
  std::string line;
  bool first = true;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (first) {
      first = false;
      if (fields.size() >= 2 && to_lower(fields[0]) == "cidr") continue;
    }
    if (fields.size() < 2)
      throw_config("BadGeoRow", "geo row needs cidr,city: " + line);
    t.add(fields[0], fields[1]);
  }
  return t;
}

}  // namespace adcost
