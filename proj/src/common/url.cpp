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

#include "common/url.hpp"

#include <cctype>

namespace adcost {
namespace {

int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex_val(s[i + 1]);
      int lo = hex_val(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

std::optional<Url> parse_url(std::string_view raw) {
  size_t scheme_end = raw.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
  Url u;
  u.scheme = to_lower(raw.substr(0, scheme_end));
  for (char c : u.scheme) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
      return std::nullopt;
  }
  if (!std::isalpha(static_cast<unsigned char>(u.scheme[0]))) return std::nullopt;

  size_t rest_begin = scheme_end + 3;
  size_t authority_end = raw.find_first_of("/?#", rest_begin);
  std::string_view authority = authority_end == std::string_view::npos
                                   ? raw.substr(rest_begin)
                                   : raw.substr(rest_begin, authority_end - rest_begin);
  if (authority.empty()) return std::nullopt;

  // Userinfo is rare in weblogs; strip it if present.
  size_t at = authority.rfind('@');
  if (at != std::string_view::npos) authority = authority.substr(at + 1);

  std::string_view hostpart = authority;
  if (!authority.empty() && authority[0] == '[') {
    size_t close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    hostpart = authority.substr(0, close + 1);
    std::string_view tail = authority.substr(close + 1);
    if (!tail.empty()) {
      if (tail[0] != ':') return std::nullopt;
      tail.remove_prefix(1);
      int port = 0;
      if (tail.empty()) return std::nullopt;
      for (char c : tail) {
        if (c < '0' || c > '9') return std::nullopt;
        port = port * 10 + (c - '0');
        if (port > 65535) return std::nullopt;
      }
      u.port = port;
    }
  } else {
    size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
      std::string_view tail = authority.substr(colon + 1);
      if (tail.empty()) return std::nullopt;
      int port = 0;
      bool numeric = true;
      for (char c : tail) {
        if (c < '0' || c > '9') {
          numeric = false;
          break;
        }
        port = port * 10 + (c - '0');
        if (port > 65535) return std::nullopt;
      }
      if (!numeric) return std::nullopt;
      u.port = port;
      hostpart = authority.substr(0, colon);
    }
  }
  if (hostpart.empty()) return std::nullopt;
  u.host = to_lower(hostpart);

  if (authority_end == std::string_view::npos) {
    u.path = "/";
    return u;
  }

  std::string_view rest = raw.substr(authority_end);
  size_t frag = rest.find('#');
  if (frag != std::string_view::npos) rest = rest.substr(0, frag);

  size_t q = rest.find('?');
  std::string_view path = q == std::string_view::npos ? rest : rest.substr(0, q);
  u.path = path.empty() ? "/" : std::string(path);

  if (q != std::string_view::npos) {
    std::string_view query = rest.substr(q + 1);
    size_t pos = 0;
    while (pos <= query.size()) {
      size_t amp = query.find('&', pos);
      std::string_view pair = amp == std::string_view::npos
                                  ? query.substr(pos)
                                  : query.substr(pos, amp - pos);
      if (!pair.empty()) {
        size_t eq = pair.find('=');
        if (eq == std::string_view::npos) {
          u.params.emplace_back(percent_decode(pair), "");
        } else {
          u.params.emplace_back(percent_decode(pair.substr(0, eq)),
                                percent_decode(pair.substr(eq + 1)));
        }
      }
      if (amp == std::string_view::npos) break;
      pos = amp + 1;
    }
  }
  return u;
}

const std::string* find_param(const Url& u, std::string_view key) {
  for (const auto& [k, v] : u.params) {
    if (k == key) return &v;
  }
  return nullptr;
}

bool host_matches_suffix(std::string_view host, std::string_view suffix) {
  if (suffix.empty() || host.size() < suffix.size()) return false;
  if (host.size() == suffix.size()) return host == suffix;
  size_t off = host.size() - suffix.size();
  return host[off - 1] == '.' && host.substr(off) == suffix;
}

std::string registrable_domain(std::string_view host) {
  size_t last = host.rfind('.');
  if (last == std::string_view::npos || last == 0) return std::string(host);
  size_t prev = host.rfind('.', last - 1);
  if (prev == std::string_view::npos) return std::string(host);
  return std::string(host.substr(prev + 1));
}

}  // namespace adcost
