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
#include <variant>
#include <vector>

#include "common/money.hpp"
#include "ingest/ingest.hpp"

namespace adcost {

struct CleartextPrice {
  MicroCpm cpm = 0;           // in (0, 10^4) CPM
  std::string currency = "USD";
};

struct EncryptedPrice {
  std::string token;  // length >= 8, charset base64url | hex | '%'
};

using PriceValue = std::variant<CleartextPrice, EncryptedPrice>;

inline bool is_cleartext(const PriceValue& p) {
  return std::holds_alternative<CleartextPrice>(p);
}

// Fields a metadata query parameter can populate. ad_width/ad_height are
// split-parameter variants that combine into the notification's ad_size.
enum class MetaField {
  ad_size,
  ad_width,
  ad_height,
  campaign_id,
  impression_id,
  bidder_name,
  publisher,
  currency,
  dsp_domain,
};

std::optional<MetaField> meta_field_from_name(std::string_view name);

enum class PriceTag { charge, bid };

struct PriceParam {
  std::string name;
  PriceTag tag = PriceTag::charge;
};

struct MacroRule {
  std::string adx_id;
  std::string host_pattern;              // suffix match on label boundary
  std::vector<PriceParam> price_params;  // declared order owns precedence
  std::vector<std::pair<std::string, MetaField>> metadata_params;
  // Set when the notified host is the bidder itself (DSP-side nURL); the
  // host then backfills dsp_domain if no metadata param supplied one.
  bool host_is_dsp = false;
};

// JSON document {"schema_version":1, "rules":[...]}. Throws
// Error(Config) on malformed rules, VersionMismatch on other versions.
std::vector<MacroRule> load_macro_rules(const std::string& path);
std::vector<MacroRule> parse_macro_rules(std::string_view json_text);

struct PriceNotification {
  std::string user_id;
  EpochMs timestamp = 0;
  std::string adx_id;
  std::optional<std::string> dsp_domain;
  PriceValue price;
  std::optional<PriceValue> bid;  // metadata only, never the price
  std::optional<std::pair<int, int>> ad_size;  // (width, height) pixels
  std::optional<std::string> impression_id;
  std::optional<std::string> campaign_id;
  std::optional<std::string> bidder_name;
  std::optional<std::string> publisher;
  std::string raw_url;
};

// Decimal-syntax values in (0, 1e4) CPM become Cleartext; everything else
// with token shape (length >= 8, allowed charset) becomes Encrypted.
// Throws Error(Data, "UnrecognizedPrice") otherwise. Decimal-syntax values
// outside the range are never reinterpreted as tokens.
PriceValue classify_price(std::string_view raw);

// Returns a notification iff the record's host matches a rule and a
// charge-tagged param with a classifiable value is present. Earlier rules
// win when several match the host.
std::optional<PriceNotification> detect(const HttpRequestRecord& record,
                                        const std::vector<MacroRule>& rules);

// (adx_id, registrable dsp domain), absent without a dsp_domain value.
std::optional<std::pair<std::string, std::string>> pair_adx_dsp(
    const PriceNotification& n);

}  // namespace adcost
