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

#include "nurl/nurl.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/url.hpp"

namespace adcost {
namespace {

using nlohmann::json;

constexpr MicroCpm kMaxCleartextMicro = MicroCpm{10'000} * kMicrosPerCpm;

bool is_decimal_syntax(std::string_view s) {
  bool seen_digit = false;
  bool seen_dot = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      return false;
    }
  }
  return seen_digit;
}

bool token_charset_ok(std::string_view s) {
  for (char c : s) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
              (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '=' ||
              c == '%';
    if (!ok) return false;
  }
  return true;
}

std::optional<int> parse_pixel(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v <= 0 || v > 16384)
    return std::nullopt;
  return v;
}

std::optional<std::pair<int, int>> parse_ad_size(std::string_view s) {
  size_t x = s.find('x');
  if (x == std::string_view::npos) x = s.find('X');
  if (x == std::string_view::npos) return std::nullopt;
  auto w = parse_pixel(s.substr(0, x));
  auto h = parse_pixel(s.substr(x + 1));
  if (!w || !h) return std::nullopt;
  return std::make_pair(*w, *h);
}

// dsp params carry either a bare hostname or a full callback URL.
std::optional<std::string> extract_dsp_host(std::string_view value) {
  if (value.empty()) return std::nullopt;
  if (value.find("://") != std::string_view::npos) {
    auto u = parse_url(value);
    if (u) return u->host;
    return std::nullopt;
  }
  std::string host = to_lower(value);
  if (host.find('/') != std::string::npos) host.resize(host.find('/'));
  if (host.empty() || host.find('.') == std::string::npos) return std::nullopt;
  return host;
}

MacroRule parse_rule(const json& j) {
  MacroRule rule;
  if (!j.is_object()) throw_config("BadMacroRule", "macro rule must be an object");
  rule.adx_id = j.value("adx_id", std::string());
  rule.host_pattern = to_lower(j.value("host_pattern", std::string()));
  if (rule.adx_id.empty())
    throw_config("BadMacroRule", "macro rule missing adx_id");
  if (rule.host_pattern.empty())
    throw_config("BadMacroRule", "macro rule missing host_pattern: " + rule.adx_id);

  auto pp = j.find("price_params");
  if (pp == j.end() || !pp->is_array())
    throw_config("BadMacroRule", "price_params must be an array: " + rule.adx_id);
  bool has_charge = false;
  for (const auto& p : *pp) {
    PriceParam param;
    param.name = p.value("name", std::string());
    std::string tag = p.value("tag", std::string());
    if (param.name.empty())
      throw_config("BadMacroRule", "price param missing name: " + rule.adx_id);
    if (tag == "charge") {
      param.tag = PriceTag::charge;
      has_charge = true;
    } else if (tag == "bid") {
      param.tag = PriceTag::bid;
    } else {
      throw_config("BadMacroRule", "price param tag must be charge|bid: " + rule.adx_id);
    }
    rule.price_params.push_back(std::move(param));
  }
  if (!has_charge)
    throw_config("BadMacroRule", "rule needs a charge-tagged param: " + rule.adx_id);

  if (auto mp = j.find("metadata_params"); mp != j.end()) {
    if (!mp->is_object())
      throw_config("BadMacroRule", "metadata_params must be an object: " + rule.adx_id);
    for (auto it = mp->begin(); it != mp->end(); ++it) {
      auto field = meta_field_from_name(it.value().get<std::string>());
      if (!field)
        throw_config("UnknownMetadataField",
                     "unknown metadata field: " + it.value().get<std::string>());
      rule.metadata_params.emplace_back(it.key(), *field);
    }
  }
  if (auto hd = j.find("host_is_dsp"); hd != j.end()) {
    if (!hd->is_boolean())
      throw_config("BadMacroRule", "host_is_dsp must be a boolean: " + rule.adx_id);
    rule.host_is_dsp = hd->get<bool>();
  }
  return rule;
}

}  // namespace

std::optional<MetaField> meta_field_from_name(std::string_view name) {
  if (name == "ad_size") return MetaField::ad_size;
  if (name == "ad_width") return MetaField::ad_width;
  if (name == "ad_height") return MetaField::ad_height;
  if (name == "campaign_id") return MetaField::campaign_id;
  if (name == "impression_id") return MetaField::impression_id;
  if (name == "bidder_name") return MetaField::bidder_name;
  if (name == "publisher") return MetaField::publisher;
  if (name == "currency") return MetaField::currency;
  if (name == "dsp_domain") return MetaField::dsp_domain;
  return std::nullopt;
}

std::vector<MacroRule> parse_macro_rules(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw_config("BadMacroFile", "macro rules file is not a JSON object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    throw_config("BadMacroFile", "macro rules file missing schema_version");
  if (doc["schema_version"].get<int>() != 1)
    throw_config("VersionMismatch", "unsupported macro rules schema_version");
  auto rules_it = doc.find("rules");
  if (rules_it == doc.end() || !rules_it->is_array())
    throw_config("BadMacroFile", "macro rules file missing rules array");
  std::vector<MacroRule> rules;
  for (const auto& r : *rules_it) rules.push_back(parse_rule(r));
  return rules;
}

std::vector<MacroRule> load_macro_rules(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_config("FileNotFound", "cannot open macro rules: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_macro_rules(ss.str());
}

PriceValue classify_price(std::string_view raw) {
  if (raw.empty())
    throw_data("UnrecognizedPrice", "empty price value");
  if (is_decimal_syntax(raw)) {
    auto micro = parse_cpm(raw);
    if (micro && *micro > 0 && *micro < kMaxCleartextMicro)
      return CleartextPrice{*micro, "USD"};
    throw_data("UnrecognizedPrice", "decimal price out of range: " + std::string(raw));
  }
  if (raw.size() >= 8 && token_charset_ok(raw))
    return EncryptedPrice{std::string(raw)};
  throw_data("UnrecognizedPrice", "value is neither decimal nor token: " + std::string(raw));
}

std::optional<PriceNotification> detect(const HttpRequestRecord& record,
                                        const std::vector<MacroRule>& rules) {
  auto url = parse_url(record.url);
  if (!url) return std::nullopt;

  for (const auto& rule : rules) {
    if (!host_matches_suffix(url->host, rule.host_pattern)) continue;

    const std::string* charge_raw = nullptr;
    const std::string* bid_raw = nullptr;
    for (const auto& pp : rule.price_params) {
      const std::string* v = find_param(*url, pp.name);
      if (!v || v->empty()) continue;
      if (pp.tag == PriceTag::charge && !charge_raw) charge_raw = v;
      if (pp.tag == PriceTag::bid && !bid_raw) bid_raw = v;
    }
    if (!charge_raw) continue;

    PriceValue price;
    try {
      price = classify_price(*charge_raw);
    } catch (const Error&) {
      continue;  // present but unclassifiable: not a usable notification
    }

    PriceNotification n;
    n.user_id = record.user_id;
    n.timestamp = record.timestamp;
    n.adx_id = rule.adx_id;
    n.price = std::move(price);
    n.raw_url = record.url;
    if (bid_raw) {
      try {
        n.bid = classify_price(*bid_raw);
      } catch (const Error&) {
        // bids are metadata only; garbage is dropped
      }
    }

    std::optional<int> width, height;
    for (const auto& [param, field] : rule.metadata_params) {
      const std::string* v = find_param(*url, param);
      if (!v || v->empty()) continue;
      switch (field) {
        case MetaField::ad_size:
          n.ad_size = parse_ad_size(*v);
          break;
        case MetaField::ad_width:
          width = parse_pixel(*v);
          break;
        case MetaField::ad_height:
          height = parse_pixel(*v);
          break;
        case MetaField::campaign_id:
          n.campaign_id = *v;
          break;
        case MetaField::impression_id:
          n.impression_id = *v;
          break;
        case MetaField::bidder_name:
          n.bidder_name = *v;
          break;
        case MetaField::publisher:
          n.publisher = *v;
          break;
        case MetaField::currency:
          if (auto* ct = std::get_if<CleartextPrice>(&n.price)) ct->currency = *v;
          break;
        case MetaField::dsp_domain:
          n.dsp_domain = extract_dsp_host(*v);
          break;
      }
    }
    if (!n.ad_size && width && height) n.ad_size = std::make_pair(*width, *height);
    if (!n.dsp_domain && rule.host_is_dsp) n.dsp_domain = url->host;
    return n;
  }
  return std::nullopt;
}

std::optional<std::pair<std::string, std::string>> pair_adx_dsp(
    const PriceNotification& n) {
  if (!n.dsp_domain) return std::nullopt;
  return std::make_pair(n.adx_id, registrable_domain(*n.dsp_domain));
}

}  // namespace adcost
