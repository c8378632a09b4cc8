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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "common/error.hpp"
#include "common/money.hpp"
#include "nurl/nurl.hpp"

using namespace adcost;

namespace {

// The three vendor rules shipped in data/macro_rules.json, inlined so the
// suite is self-contained no matter where the test binary runs.
const char* kVendorRules = R"({
  "schema_version": 1,
  "rules": [
    {
      "adx_id": "mopub",
      "host_pattern": "mpx.mopub.com",
      "price_params": [
        {"name": "charge_price", "tag": "charge"},
        {"name": "bid_price", "tag": "bid"}
      ],
      "metadata_params": {
        "currency": "currency",
        "bidder_name": "bidder_name",
        "pub_name": "publisher",
        "mopub_id": "impression_id"
      }
    },
    {
      "adx_id": "rubicon",
      "host_pattern": "tags.mathtag.com",
      "price_params": [{"name": "price", "tag": "charge"}],
      "host_is_dsp": true
    },
    {
      "adx_id": "doubleclick",
      "host_pattern": "mythings.com",
      "price_params": [
        {"name": "rtbwinprice", "tag": "charge"},
        {"name": "mcpm", "tag": "bid"}
      ],
      "metadata_params": {
        "width": "ad_width",
        "height": "ad_height",
        "cmpid": "campaign_id"
      },
      "host_is_dsp": true
    }
  ]
})";

std::vector<MacroRule> vendor_rules() { return parse_macro_rules(kVendorRules); }

HttpRequestRecord make_record(std::string url) {
  HttpRequestRecord r;
  r.timestamp = 1431648000000;
  r.user_id = "u42";
  r.url = std::move(url);
  r.user_agent = "Mozilla/5.0";
  return r;
}

MicroCpm cleartext_micros(const PriceValue& p) {
  REQUIRE(is_cleartext(p));
  return std::get<CleartextPrice>(p).cpm;
}

const std::string& token_of(const PriceValue& p) {
  REQUIRE(!is_cleartext(p));
  return std::get<EncryptedPrice>(p).token;
}

}  // namespace

TEST_SUITE_BEGIN("nurl");

TEST_CASE("classify_price splits decimals from opaque tokens") {
  auto p = classify_price("0.95");
  CHECK(cleartext_micros(p) == 950'000);
  CHECK(std::get<CleartextPrice>(p).currency == "USD");

  CHECK(cleartext_micros(classify_price("60")) == 60 * kMicrosPerCpm);
  CHECK(cleartext_micros(classify_price("0.000001")) == 1);
  CHECK(cleartext_micros(classify_price("9999.999999")) ==
        MicroCpm{10'000} * kMicrosPerCpm - 1);

  CHECK(token_of(classify_price("B6A3F3C19F50C7FD")) == "B6A3F3C19F50C7FD");
  CHECK(token_of(classify_price("VLwbi4K21KFAAAm2ziqnOS_O5oNkFuuJw")) ==
        "VLwbi4K21KFAAAm2ziqnOS_O5oNkFuuJw");
  CHECK(token_of(classify_price("abcd-efg_123=")) == "abcd-efg_123=");
  CHECK(token_of(classify_price("%41%42%43%44")) == "%41%42%43%44");
}

TEST_CASE("classify_price rejects out-of-range and malformed values") {
  CHECK_THROWS_WITH_AS(classify_price(""), doctest::Contains("UnrecognizedPrice"),
                       Error);
  // Zero and the upper bound sit outside the open interval.
  CHECK_THROWS_AS(classify_price("0"), Error);
  CHECK_THROWS_AS(classify_price("0.0"), Error);
  CHECK_THROWS_AS(classify_price("10000"), Error);
  // Decimal syntax out of range never falls back to token classification,
  // even when the digits would satisfy the token length and charset.
  CHECK_THROWS_AS(classify_price("12345678"), Error);
  CHECK_THROWS_AS(classify_price("10000.25"), Error);
  // Too short or wrong charset for a token.
  CHECK_THROWS_AS(classify_price("abc"), Error);
  CHECK_THROWS_AS(classify_price("hello world!"), Error);
  CHECK_THROWS_AS(classify_price("1.2.3.4.5"), Error);
  CHECK_THROWS_AS(classify_price("a+b/c=d!"), Error);

  for (const char* bad : {"", "0", "10000", "abc", "!!!!!!!!"}) {
    try {
      classify_price(bad);
      FAIL("expected throw for: ", bad);
    } catch (const Error& e) {
      CHECK(e.code() == "UnrecognizedPrice");
    }
  }
}

TEST_CASE("mopub-style url yields cleartext charge with bid as metadata") {
  auto rules = vendor_rules();
  auto rec = make_record(
      "http://cpp.imp.mpx.mopub.com/imp?ad_domain=amazon.es&ads_creative_id=4f2a"
      "&bid_price=0.99&bidder_id=21&bidder_name=dsp-west&charge_price=0.95"
      "&country=ES&currency=USD&latency=0.116&mopub_id=ab12cd&pub_name=newsapp");
  auto n = detect(rec, rules);
  REQUIRE(n.has_value());
  CHECK(n->adx_id == "mopub");
  CHECK(n->user_id == "u42");
  CHECK(n->timestamp == 1431648000000);
  // The charge is the 0.95 value, not the 0.99 bid.
  CHECK(cleartext_micros(n->price) == 950'000);
  CHECK(std::get<CleartextPrice>(n->price).currency == "USD");
  REQUIRE(n->bid.has_value());
  CHECK(cleartext_micros(*n->bid) == 990'000);
  REQUIRE(n->impression_id.has_value());
  CHECK(*n->impression_id == "ab12cd");
  REQUIRE(n->bidder_name.has_value());
  CHECK(*n->bidder_name == "dsp-west");
  REQUIRE(n->publisher.has_value());
  CHECK(*n->publisher == "newsapp");
  // Exchange-side host: no dsp pairing available.
  CHECK(!n->dsp_domain.has_value());
  CHECK(!pair_adx_dsp(*n).has_value());
  CHECK(n->raw_url == rec.url);
}

TEST_CASE("mathtag-style url yields encrypted token and dsp pairing") {
  auto rules = vendor_rules();
  auto rec = make_record(
      "http://tags.mathtag.com/notify/js?exch=ruc&price=B6A3F3C19F50C7FD"
      "&3pck=http%3A%2F%2Fbeacon-eu2.rubiconproject.com%2Fbeacon%2Ft%2F"
      "ce48666c-6eb4-46db-b0e9-6f4155eb557d%2F");
  auto n = detect(rec, rules);
  REQUIRE(n.has_value());
  CHECK(n->adx_id == "rubicon");
  CHECK(token_of(n->price) == "B6A3F3C19F50C7FD");
  CHECK(!n->bid.has_value());
  // The notified host is the bidder, so it backfills the dsp side.
  REQUIRE(n->dsp_domain.has_value());
  CHECK(*n->dsp_domain == "tags.mathtag.com");
  auto pair = pair_adx_dsp(*n);
  REQUIRE(pair.has_value());
  CHECK(pair->first == "rubicon");
  CHECK(pair->second == "mathtag.com");
}

TEST_CASE("mythings-style url yields token charge plus cleartext bid") {
  auto rules = vendor_rules();
  auto rec = make_record(
      "http://adserver-ir-p.mythings.com/ads/admainrtb.aspx?googid=9a1"
      "&width=300&height=250&cmpid=77&gid=3&mcpm=60"
      "&rtbwinprice=VLwbi4K21KFAAAm2ziqnOS_O5oNkFuuJw");
  auto n = detect(rec, rules);
  REQUIRE(n.has_value());
  CHECK(n->adx_id == "doubleclick");
  CHECK(token_of(n->price) == "VLwbi4K21KFAAAm2ziqnOS_O5oNkFuuJw");
  REQUIRE(n->bid.has_value());
  CHECK(cleartext_micros(*n->bid) == 60 * kMicrosPerCpm);
  REQUIRE(n->ad_size.has_value());
  CHECK(n->ad_size->first == 300);
  CHECK(n->ad_size->second == 250);
  REQUIRE(n->campaign_id.has_value());
  CHECK(*n->campaign_id == "77");
  auto pair = pair_adx_dsp(*n);
  REQUIRE(pair.has_value());
  CHECK(pair->first == "doubleclick");
  CHECK(pair->second == "mythings.com");
}

TEST_CASE("detect ignores hosts that no rule matches") {
  auto rules = vendor_rules();
  CHECK(!detect(make_record("http://example.org/a?price=1.5"), rules).has_value());
  // Suffix match is label aligned: evilmopub.com is not mopub.com.
  CHECK(!detect(make_record("http://evilmpx.mopub.org/imp?charge_price=1"), rules)
             .has_value());
  CHECK(!detect(make_record("not a url"), rules).has_value());
  CHECK(!detect(make_record(""), rules).has_value());
}

TEST_CASE("detect requires a classifiable charge value") {
  auto rules = vendor_rules();
  // Missing charge param.
  CHECK(!detect(make_record("http://mpx.mopub.com/imp?bid_price=0.99"), rules)
             .has_value());
  // Present but empty.
  CHECK(!detect(make_record("http://mpx.mopub.com/imp?charge_price="), rules)
             .has_value());
  // Present but garbage.
  CHECK(!detect(make_record("http://mpx.mopub.com/imp?charge_price=n%2Fa"), rules)
             .has_value());
  // Decimal out of range stays unusable rather than becoming a token.
  CHECK(!detect(make_record("http://mpx.mopub.com/imp?charge_price=99999999"),
                rules)
             .has_value());
}

TEST_CASE("earlier rules win and unclassifiable charges fall through") {
  auto two = parse_macro_rules(R"({
    "schema_version": 1,
    "rules": [
      {"adx_id": "first", "host_pattern": "ads.example.com",
       "price_params": [{"name": "p", "tag": "charge"}]},
      {"adx_id": "second", "host_pattern": "example.com",
       "price_params": [{"name": "q", "tag": "charge"}]}
    ]
  })");

  // Both rules match the host and both params are usable: first rule wins.
  auto n = detect(make_record("http://ads.example.com/x?p=1.5&q=2.5"), two);
  REQUIRE(n.has_value());
  CHECK(n->adx_id == "first");
  CHECK(cleartext_micros(n->price) == 1'500'000);

  // First rule's charge is garbage, so the second matching rule takes over.
  n = detect(make_record("http://ads.example.com/x?p=zz&q=2.5"), two);
  REQUIRE(n.has_value());
  CHECK(n->adx_id == "second");
  CHECK(cleartext_micros(n->price) == 2'500'000);

  // Only the broader suffix matches this host.
  n = detect(make_record("http://pixel.example.com/x?p=1.5&q=2.5"), two);
  REQUIRE(n.has_value());
  CHECK(n->adx_id == "second");
}

TEST_CASE("declared order picks among several charge params") {
  auto rules = parse_macro_rules(R"({
    "schema_version": 1,
    "rules": [
      {"adx_id": "a", "host_pattern": "x.test",
       "price_params": [
         {"name": "wp", "tag": "charge"},
         {"name": "price", "tag": "charge"}
       ]}
    ]
  })");
  auto n = detect(make_record("http://x.test/?price=2.5&wp=1.5"), rules);
  REQUIRE(n.has_value());
  CHECK(cleartext_micros(n->price) == 1'500'000);

  // With the first param absent the second one carries the charge.
  n = detect(make_record("http://x.test/?price=2.5"), rules);
  REQUIRE(n.has_value());
  CHECK(cleartext_micros(n->price) == 2'500'000);
}

TEST_CASE("garbage bids are dropped without losing the notification") {
  auto rules = vendor_rules();
  auto n = detect(
      make_record("http://mpx.mopub.com/imp?charge_price=0.5&bid_price=oops"),
      rules);
  REQUIRE(n.has_value());
  CHECK(cleartext_micros(n->price) == 500'000);
  CHECK(!n->bid.has_value());
}

TEST_CASE("currency metadata rewrites only cleartext prices") {
  auto rules = parse_macro_rules(R"({
    "schema_version": 1,
    "rules": [
      {"adx_id": "a", "host_pattern": "x.test",
       "price_params": [{"name": "p", "tag": "charge"}],
       "metadata_params": {"cur": "currency"}}
    ]
  })");
  auto n = detect(make_record("http://x.test/?p=1.5&cur=EUR"), rules);
  REQUIRE(n.has_value());
  CHECK(std::get<CleartextPrice>(n->price).currency == "EUR");

  n = detect(make_record("http://x.test/?p=AAAABBBBCCCC&cur=EUR"), rules);
  REQUIRE(n.has_value());
  CHECK(!is_cleartext(n->price));
}

TEST_CASE("ad size comes from WxH values or split width and height") {
  auto rules = parse_macro_rules(R"({
    "schema_version": 1,
    "rules": [
      {"adx_id": "a", "host_pattern": "x.test",
       "price_params": [{"name": "p", "tag": "charge"}],
       "metadata_params": {"size": "ad_size", "w": "ad_width", "h": "ad_height"}}
    ]
  })");

  auto n = detect(make_record("http://x.test/?p=1&size=300x250"), rules);
  REQUIRE(n.has_value());
  CHECK(n->ad_size == std::make_pair(300, 250));

  // Uppercase separator also parses.
  n = detect(make_record("http://x.test/?p=1&size=728X90"), rules);
  REQUIRE(n.has_value());
  CHECK(n->ad_size == std::make_pair(728, 90));

  // Split parameters combine only when both halves are present and valid.
  n = detect(make_record("http://x.test/?p=1&w=320&h=50"), rules);
  REQUIRE(n.has_value());
  CHECK(n->ad_size == std::make_pair(320, 50));

  n = detect(make_record("http://x.test/?p=1&w=320"), rules);
  REQUIRE(n.has_value());
  CHECK(!n->ad_size.has_value());

  // A combined value takes precedence over the split parameters.
  n = detect(make_record("http://x.test/?p=1&size=300x250&w=1&h=1"), rules);
  REQUIRE(n.has_value());
  CHECK(n->ad_size == std::make_pair(300, 250));

  for (const char* bad : {"banner", "0x250", "300x", "x250", "-1x50", "99999x2"}) {
    n = detect(make_record(std::string("http://x.test/?p=1&size=") + bad), rules);
    REQUIRE(n.has_value());
    CHECK(!n->ad_size.has_value());
  }
}

TEST_CASE("dsp metadata accepts hostnames and callback urls") {
  auto rules = parse_macro_rules(R"({
    "schema_version": 1,
    "rules": [
      {"adx_id": "a", "host_pattern": "x.test",
       "price_params": [{"name": "p", "tag": "charge"}],
       "metadata_params": {"dsp": "dsp_domain"},
       "host_is_dsp": true}
    ]
  })");

  // Bare hostname.
  auto n = detect(make_record("http://x.test/?p=1&dsp=bid.partner.example"), rules);
  REQUIRE(n.has_value());
  CHECK(n->dsp_domain == std::string("bid.partner.example"));

  // Percent-encoded callback URL: host is extracted after decoding.
  n = detect(make_record("http://x.test/?p=1&dsp=http%3A%2F%2Fcb.partner.example"
                         "%2Fnotify%2F1"),
             rules);
  REQUIRE(n.has_value());
  CHECK(n->dsp_domain == std::string("cb.partner.example"));

  // Hostname with a trailing path and mixed case.
  n = detect(make_record("http://x.test/?p=1&dsp=Bid.Partner.Example/cb"), rules);
  REQUIRE(n.has_value());
  CHECK(n->dsp_domain == std::string("bid.partner.example"));

  // An explicit dsp param wins over the host backfill; without it the
  // notified host fills in because the rule marks the host as the bidder.
  n = detect(make_record("http://x.test/?p=1"), rules);
  REQUIRE(n.has_value());
  CHECK(n->dsp_domain == std::string("x.test"));

  auto pair = pair_adx_dsp(*n);
  REQUIRE(pair.has_value());
  CHECK(pair->second == "x.test");
}

TEST_CASE("pair_adx_dsp reduces the dsp host to its registrable domain") {
  PriceNotification n;
  n.adx_id = "adx";
  CHECK(!pair_adx_dsp(n).has_value());

  n.dsp_domain = "a.b.c.partner.example";
  auto pair = pair_adx_dsp(n);
  REQUIRE(pair.has_value());
  CHECK(pair->first == "adx");
  CHECK(pair->second == "partner.example");
}

TEST_CASE("macro rule files load from disk and validate") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "adcost_test_nurl";
  fs::create_directories(dir);
  fs::path path = dir / "rules.json";
  {
    std::ofstream out(path, std::ios::binary);
    out << kVendorRules;
  }
  auto rules = load_macro_rules(path.string());
  REQUIRE(rules.size() == 3);
  CHECK(rules[0].adx_id == "mopub");
  CHECK(rules[0].host_pattern == "mpx.mopub.com");
  REQUIRE(rules[0].price_params.size() == 2);
  CHECK(rules[0].price_params[0].name == "charge_price");
  CHECK(rules[0].price_params[0].tag == PriceTag::charge);
  CHECK(rules[0].price_params[1].tag == PriceTag::bid);
  CHECK(rules[0].metadata_params.size() == 4);
  CHECK(!rules[0].host_is_dsp);
  CHECK(rules[1].host_is_dsp);
  CHECK(rules[2].adx_id == "doubleclick");

  CHECK_THROWS_WITH_AS(load_macro_rules((dir / "missing.json").string()),
                       doctest::Contains("FileNotFound"), Error);
  fs::remove_all(dir);
}

TEST_CASE("macro rule parsing rejects malformed documents") {
  auto code_of = [](const char* text) {
    try {
      parse_macro_rules(text);
      return std::string("no-throw");
    } catch (const Error& e) {
      return std::string(e.code());
    }
  };

  CHECK(code_of("[]") == "BadMacroFile");
  CHECK(code_of("{\"rules\": []}") == "BadMacroFile");
  CHECK(code_of("{\"schema_version\": 1}") == "BadMacroFile");
  CHECK(code_of("{\"schema_version\": 2, \"rules\": []}") == "VersionMismatch");
  CHECK(code_of("not json") == "BadMacroFile");

  // Rule-level validation.
  CHECK(code_of(R"({"schema_version":1,"rules":[
    {"host_pattern":"x.test","price_params":[{"name":"p","tag":"charge"}]}
  ]})") == "BadMacroRule");
  CHECK(code_of(R"({"schema_version":1,"rules":[
    {"adx_id":"a","price_params":[{"name":"p","tag":"charge"}]}
  ]})") == "BadMacroRule");
  CHECK(code_of(R"({"schema_version":1,"rules":[
    {"adx_id":"a","host_pattern":"x.test"}
  ]})") == "BadMacroRule");
  CHECK(code_of(R"({"schema_version":1,"rules":[
    {"adx_id":"a","host_pattern":"x.test",
     "price_params":[{"name":"p","tag":"bid"}]}
  ]})") == "BadMacroRule");
  CHECK(code_of(R"({"schema_version":1,"rules":[
    {"adx_id":"a","host_pattern":"x.test",
     "price_params":[{"name":"p","tag":"win"}]}
  ]})") == "BadMacroRule");
  CHECK(code_of(R"({"schema_version":1,"rules":[
    {"adx_id":"a","host_pattern":"x.test",
     "price_params":[{"name":"p","tag":"charge"}],
     "metadata_params":{"z":"not_a_field"}}
  ]})") == "UnknownMetadataField");
  CHECK(code_of(R"({"schema_version":1,"rules":[
    {"adx_id":"a","host_pattern":"x.test",
     "price_params":[{"name":"p","tag":"charge"}],
     "host_is_dsp":"yes"}
  ]})") == "BadMacroRule");
}

TEST_SUITE_END();
