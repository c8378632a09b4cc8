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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adcost {

// Parsed absolute URL. Query parameters keep document order and are
// percent-decoded exactly once; '+' is NOT translated to space.
struct Url {
  std::string scheme;  // lowercased
  std::string host;    // lowercased
  int port = -1;       // -1 when absent
  std::string path;    // raw, leading '/', empty query/fragment stripped
  std::vector<std::pair<std::string, std::string>> params;
};

std::optional<Url> parse_url(std::string_view raw);

// Decodes %XX sequences once; malformed escapes are kept verbatim.
std::string percent_decode(std::string_view s);

// First value for `key`, if present.
const std::string* find_param(const Url& u, std::string_view key);

// True when host == suffix or host ends with "." + suffix (label boundary).
bool host_matches_suffix(std::string_view host, std::string_view suffix);

// Last two labels of a hostname ("tags.mathtag.com" -> "mathtag.com").
// Hosts with fewer than two labels are returned unchanged.
std::string registrable_domain(std::string_view host);

std::string to_lower(std::string_view s);

}  // namespace adcost
