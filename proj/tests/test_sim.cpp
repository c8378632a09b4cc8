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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"

#include "common/error.hpp"
#include "common/money.hpp"
#include "ingest/ingest.hpp"
#include "model/binning.hpp"
#include "nurl/nurl.hpp"
#include "sim/sim.hpp"

using namespace adcost;
namespace fs = std::filesystem;

namespace {

SimConfig small_config(std::uint64_t seed = 7) {
  SimConfig cfg = default_sim_config();
  cfg.seed = seed;
  cfg.n_users = 40;
  cfg.target_impressions = 2000;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("sim");

TEST_CASE("second price auction charges the best losing bid") {
  // 0.99 wins, pays the runner-up's 0.95.
  auto r = run_auction({{"A", 990'000}, {"B", 950'000}});
  CHECK(r.winner_index == 0);
  CHECK(r.winner_dsp == "A");
  CHECK(r.winning_bid == 990'000);
  CHECK(r.charge == 950'000);

  // Ties settle on the earliest bidder at full price.
  r = run_auction({{"A", 1'000'000}, {"B", 1'000'000}});
  CHECK(r.winner_dsp == "A");
  CHECK(r.charge == 1'000'000);

  CHECK_THROWS_WITH_AS(run_auction({}), doctest::Contains("TooFewBids"), Error);
  CHECK_THROWS_WITH_AS(run_auction({{"A", 1}}), doctest::Contains("TooFewBids"),
                       Error);
  CHECK_THROWS_WITH_AS(run_auction({{"A", 1}, {"B", 0}}),
                       doctest::Contains("NonPositiveBid"), Error);
  CHECK_THROWS_WITH_AS(run_auction({{"A", -5}, {"B", 3}}),
                       doctest::Contains("NonPositiveBid"), Error);
}

TEST_CASE("ten thousand random auctions match the sort oracle") {
  std::mt19937_64 rng(41);
  const char* names[] = {"d0", "d1", "d2", "d3", "d4", "d5"};
  for (int trial = 0; trial < 10'000; ++trial) {
    size_t n = 2 + rng() % 5;
    std::vector<Bid> bids;
    for (size_t i = 0; i < n; ++i) {
      bids.push_back({names[i], 1 + static_cast<MicroCpm>(rng() % 10'000'000)});
    }

    // Oracle: scan for the max (first on ties), charge is the best of the rest.
    size_t want_win = 0;
    for (size_t i = 1; i < n; ++i) {
      if (bids[i].cpm > bids[want_win].cpm) want_win = i;
    }
    MicroCpm want_charge = 0;
    for (size_t i = 0; i < n; ++i) {
      if (i != want_win) want_charge = std::max(want_charge, bids[i].cpm);
    }

    auto r = run_auction(bids);
    CAPTURE(trial);
    REQUIRE(r.winner_index == want_win);
    REQUIRE(r.winner_dsp == bids[want_win].dsp);
    REQUIRE(r.charge == want_charge);
    REQUIRE(r.charge <= r.winning_bid);
  }
}

TEST_CASE("sealed tokens round-trip and stay opaque to the detector") {
  const std::uint64_t key = 0xFEEDFACE12345678ULL;
  std::string t = encode_price(950'000, key);
  CHECK(t.size() == 38);
  CHECK(unseal(t, key) == 950'000);

  CHECK(encode_price(950'000, key) == t);           // deterministic
  CHECK(encode_price(950'001, key) != t);           // price injective
  CHECK(encode_price(950'000, key, 1) != t);        // nonce injective
  CHECK(unseal(encode_price(950'000, key, 1), key) == 950'000);

  // Tampering, truncation, foreign charset, and wrong keys all fail closed.
  std::string bad = t;
  bad[0] = bad[0] == 'A' ? 'B' : 'A';
  CHECK_THROWS_WITH_AS(unseal(bad, key), doctest::Contains("BadToken"), Error);
  CHECK_THROWS_WITH_AS(unseal(t.substr(0, 37), key),
                       doctest::Contains("BadToken"), Error);
  bad = t;
  bad[5] = '!';
  CHECK_THROWS_WITH_AS(unseal(bad, key), doctest::Contains("BadToken"), Error);
  CHECK_THROWS_WITH_AS(unseal(t, key + 1), doctest::Contains("BadToken"), Error);
  CHECK_THROWS_WITH_AS(encode_price(0, key),
                       doctest::Contains("NonPositivePrice"), Error);
}

TEST_CASE("ten thousand tokens collide never and always classify encrypted") {
  const std::uint64_t key = 0x5EA1ED0DECADEULL;
  std::mt19937_64 rng(99);
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < 10'000; ++i) {
    MicroCpm cpm = 1 + static_cast<MicroCpm>(rng() % 9'000'000'000LL);
    std::string tok = encode_price(cpm, key, i);
    REQUIRE(seen.insert(tok).second);
    REQUIRE(unseal(tok, key) == cpm);
    auto price = classify_price(tok);
    REQUIRE(std::holds_alternative<EncryptedPrice>(price));
  }
  CHECK(seen.size() == 10'000);
}

TEST_CASE("deterministic price law multiplies per-level factors") {
  PriceLaw law;
  law.base_cpm = 2.0;
  law.noise_sigma = 0;
  law.adx_mult = {{"x1", 3.0}};
  law.interaction_mult = {{"app", 2.6}};
  law.os_mult = {{"ios", 1.3}};
  law.tod_mult = {{"6pm-12am", 1.6}};
  law.hour_slope = 0.02;

  CoreFeatures s;
  s.adx_id = "x1";
  s.interaction = "app";
  s.os = "ios";
  s.tod_bucket = "6pm-12am";
  s.hour_of_day = 12;  // slope term vanishes at noon

  // Unlisted levels contribute a neutral factor of 1.
  CHECK(deterministic_cpm(law, s) ==
        doctest::Approx(2.0 * 3.0 * 2.6 * 1.3 * 1.6).epsilon(1e-12));

  s.hour_of_day = 17;
  CHECK(deterministic_cpm(law, s) ==
        doctest::Approx(2.0 * 3.0 * 2.6 * 1.3 * 1.6 * 1.1).epsilon(1e-12));

  law.adx_only = true;
  CHECK(deterministic_cpm(law, s) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("simulation is deterministic in the config") {
  auto cfg = small_config();
  auto a = simulate(cfg);
  auto b = simulate(cfg);

  CHECK(a.weblog == b.weblog);
  CHECK(a.contributions == b.contributions);
  CHECK(a.n_impressions == b.n_impressions);
  CHECK(a.user_truth.size() == b.user_truth.size());
  for (const auto& [uid, truth] : a.user_truth) {
    REQUIRE(b.user_truth.count(uid) == 1);
    CHECK(b.user_truth.at(uid).cleartext_micro == truth.cleartext_micro);
    CHECK(b.user_truth.at(uid).encrypted_micro == truth.encrypted_micro);
  }
  REQUIRE(a.tokens.size() == b.tokens.size());
  for (const auto& [tok, st] : a.tokens) {
    REQUIRE(b.tokens.count(tok) == 1);
    CHECK(b.tokens.at(tok).cpm == st.cpm);
    CHECK(b.tokens.at(tok).cls == st.cls);
  }

  // A different seed moves the stream.
  auto c = simulate(small_config(8));
  CHECK(a.weblog != c.weblog);
}

TEST_CASE("every emitted notification is detectable and ledger-consistent") {
  auto cfg = small_config();
  auto data = simulate(cfg);
  auto rules = parse_macro_rules(sim_macro_rules_json(cfg));

  std::map<std::string, MicroCpm> clear_sum;
  std::map<std::string, MicroCpm> enc_sum;
  size_t detected = 0;
  ParseCounters counters;
  for (const auto& line : data.weblog) {
    auto rec = parse_record(line, LogFormat::json_lines, counters);
    REQUIRE(rec.has_value());
    auto n = detect(*rec, rules);
    if (!n) continue;
    ++detected;
    if (const auto* clear = std::get_if<CleartextPrice>(&n->price)) {
      clear_sum[n->user_id] += clear->cpm;
      if (n->bid && std::holds_alternative<CleartextPrice>(*n->bid)) {
        // Second-price invariant surfaces in the logged metadata.
        CHECK(clear->cpm <= std::get<CleartextPrice>(*n->bid).cpm);
      }
    } else {
      const auto& token = std::get<EncryptedPrice>(n->price).token;
      REQUIRE(data.tokens.count(token) == 1);
      const auto& sealed = data.tokens.at(token);
      CHECK(unseal(token, cfg.token_key) == sealed.cpm);
      CHECK(sealed.cls == data.reference_binning.class_of(sealed.cpm));
      enc_sum[n->user_id] += sealed.cpm;
    }
  }

  // Recall is total: one detection per generated impression.
  CHECK(detected == data.n_impressions);
  CHECK(counters.skipped == 0);

  // Per-user sums recovered through detection equal the sealed truth.
  for (const auto& [uid, truth] : data.user_truth) {
    CHECK(clear_sum[uid] == truth.cleartext_micro);
    CHECK(enc_sum[uid] == truth.encrypted_micro);
  }
}

TEST_CASE("generated charges balance across the reference classes") {
  auto data = simulate(small_config());
  REQUIRE(data.reference_binning.k == 4);

  std::vector<size_t> counts(4, 0);
  size_t total = 0;
  for (const auto& line : data.contributions) {
    auto j = nlohmann::json::parse(line);
    auto micro = parse_cpm(j.at("price").get<std::string>());
    REQUIRE(micro.has_value());
    counts[static_cast<size_t>(data.reference_binning.class_of(*micro))]++;
    ++total;
  }
  CHECK(total == data.n_impressions);
  for (size_t cls = 0; cls < 4; ++cls) {
    double share = static_cast<double>(counts[cls]) / static_cast<double>(total);
    CAPTURE(cls);
    CHECK(share > 0.15);
    CHECK(share < 0.35);
  }
}

TEST_CASE("cleartext-only marketplaces have no encrypted spend") {
  auto cfg = small_config();
  cfg.adxs = {{"clearbid", "imp.clearbid.test", NurlTemplate::clear_a},
              {"pricenote", "win.pricenote.test", NurlTemplate::clear_b}};
  auto data = simulate(cfg);

  CHECK(data.tokens.empty());
  for (const auto& [uid, truth] : data.user_truth) {
    CHECK(truth.encrypted_micro == 0);
    CHECK(truth.cleartext_micro > 0);
  }
}

TEST_CASE("reference binning splits charges at log quantiles") {
  // Exactly k distinct values: cuts at pairwise midpoints, classes isolate.
  std::vector<MicroCpm> four;
  const MicroCpm vals[] = {1'000'000, 2'000'000, 4'000'000, 8'000'000};
  for (int rep = 0; rep < 5; ++rep)
    for (MicroCpm v : vals) four.push_back(v);
  auto bin = reference_binning_from_charges(four, 4);
  REQUIRE(bin.representatives.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(bin.class_of(vals[i]) == i);
    CHECK(bin.representatives[static_cast<size_t>(i)] == vals[i]);
  }

  // Eight distinct values, two per class; the representative is the lower
  // member of each pair (the lower median).
  std::vector<MicroCpm> eight;
  for (int i = 1; i <= 8; ++i) eight.push_back(static_cast<MicroCpm>(i) * 1'000'000);
  bin = reference_binning_from_charges(eight, 4);
  CHECK(bin.class_of(1'000'000) == 0);
  CHECK(bin.class_of(2'000'000) == 0);
  CHECK(bin.class_of(3'000'000) == 1);
  CHECK(bin.class_of(4'000'000) == 1);
  CHECK(bin.class_of(5'000'000) == 2);
  CHECK(bin.class_of(7'000'000) == 3);
  CHECK(bin.representatives ==
        std::vector<MicroCpm>{1'000'000, 3'000'000, 5'000'000, 7'000'000});

  // Quantile cuts keep a lognormal sample near balance.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 0.8);
  std::vector<MicroCpm> sample;
  for (int i = 0; i < 10'000; ++i) {
    sample.push_back(static_cast<MicroCpm>(
        std::llround(2.0 * std::exp(gauss(rng)) * kMicrosPerCpm)));
  }
  bin = reference_binning_from_charges(sample, 4);
  std::vector<size_t> counts(4, 0);
  for (MicroCpm c : sample) counts[static_cast<size_t>(bin.class_of(c))]++;
  for (size_t cls = 0; cls < 4; ++cls) {
    double share = static_cast<double>(counts[cls]) / 10'000.0;
    CHECK(share > 0.2);
    CHECK(share < 0.3);
  }

  CHECK_THROWS_WITH_AS(reference_binning_from_charges({}, 4),
                       doctest::Contains("TooFewSamples"), Error);
  CHECK_THROWS_WITH_AS(reference_binning_from_charges(four, 0),
                       doctest::Contains("BadClassCount"), Error);
  CHECK_THROWS_WITH_AS(
      reference_binning_from_charges({1'000'000, 2'000'000, 4'000'000}, 4),
      doctest::Contains("TooFewDistinct"), Error);
  std::vector<MicroCpm> lumpy = {1'000'000, 1'000'000, 1'000'000, 1'000'000,
                                 1'000'000, 1'000'000, 2'000'000, 3'000'000,
                                 4'000'000, 5'000'000};
  CHECK_THROWS_WITH_AS(reference_binning_from_charges(lumpy, 4),
                       doctest::Contains("DegenerateQuantiles"), Error);
}

TEST_CASE("simulation config validation") {
  auto cfg = small_config();
  cfg.dsps = {"only-one.test"};
  CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("TooFewDsps"), Error);

  cfg = small_config();
  cfg.adxs.clear();
  CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("NoAdxs"), Error);

  cfg = small_config();
  cfg.publishers.clear();
  CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("NoPublishers"), Error);

  cfg = small_config();
  cfg.n_users = 0;
  CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("BadSimConfig"), Error);

  cfg = small_config();
  cfg.price_law.base_cpm = 0;
  CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("BadSimConfig"), Error);
}

TEST_CASE("bundle writer lays out a self-contained corpus") {
  auto cfg = small_config(21);
  cfg.n_users = 10;
  cfg.target_impressions = 300;
  auto data = simulate(cfg);

  fs::path dir = fs::temp_directory_path() / "adcost_test_sim_bundle";
  fs::remove_all(dir);
  write_bundle(data, cfg, dir.string());

  for (const char* name :
       {"weblog.jsonl", "sealed_ledger.json", "contributions.jsonl",
        "macro_rules.json", "blacklist.csv", "geo.csv", "iab_map.csv",
        "config.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }

  // The weblog file holds exactly the generated lines.
  std::ifstream weblog(dir / "weblog.jsonl");
  size_t lines = 0;
  std::string line;
  while (std::getline(weblog, line)) ++lines;
  CHECK(lines == data.weblog.size());

  // The rules file loads through the detector path.
  auto rules = load_macro_rules((dir / "macro_rules.json").string());
  CHECK(rules.size() == cfg.adxs.size() + 3);

  // The sealed ledger round-trips as JSON with per-token truth.
  std::ifstream ledger_in(dir / "sealed_ledger.json");
  auto ledger = nlohmann::json::parse(ledger_in);
  CHECK(ledger.at("n_impressions").get<size_t>() == data.n_impressions);
  CHECK(ledger.at("tokens").size() == data.tokens.size());
  CHECK(ledger.at("users").size() == data.user_truth.size());
  for (const auto& [uid, truth] : data.user_truth) {
    auto& uj = ledger.at("users").at(uid);
    CHECK(*parse_cpm(uj.at("cleartext").get<std::string>()) == truth.cleartext_micro);
    CHECK(*parse_cpm(uj.at("encrypted").get<std::string>()) == truth.encrypted_micro);
  }

  fs::remove_all(dir);
}

TEST_SUITE_END();
