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
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "common/error.hpp"
#include "cost/cost.hpp"
#include "model/dataset.hpp"
#include "model/forest.hpp"

using namespace adcost;

namespace {

CoreFeatures make_row(std::string adx, std::string city, int hour,
                      std::string iab = "IAB12") {
  CoreFeatures s;
  s.interaction = "mobile_web";
  s.device_type = "smartphone";
  s.os = "android";
  s.city = std::move(city);
  s.tod_bucket = hour < 9 ? "12am-9am" : (hour < 18 ? "9am-6pm" : "6pm-12am");
  s.day_of_week = "fri";
  s.ad_size = "300x250";
  s.publisher_iab = std::move(iab);
  s.adx_id = std::move(adx);
  s.hour_of_day = hour;
  return s;
}

// Four classes fully determined by adx_id, with nuisance city and hour.
RandomForestModel fitted_model() {
  const char* adxs[] = {"a0", "a1", "a2", "a3"};
  const char* cities[] = {"madrid", "paris", "rome", "berlin", "lisbon"};
  std::vector<CoreFeatures> rows;
  std::vector<int> labels;
  std::mt19937_64 rng(3);
  for (int cls = 0; cls < 4; ++cls) {
    for (int i = 0; i < 30; ++i) {
      rows.push_back(make_row(adxs[cls], cities[rng() % 5],
                              static_cast<int>(rng() % 24)));
      labels.push_back(cls);
    }
  }
  ForestHyperParams hp;
  hp.n_trees = 15;
  auto m = fit_forest(build_dataset(rows, labels), hp, 9);
  m.binning.k = 4;
  m.binning.boundaries = {0.0, 1.0, 2.0};
  m.binning.representatives = {160'000, 800'000, 3'600'000, 16'000'000};
  return m;
}

PriceNotification clear_notif(std::string user, int64_t ts, MicroCpm micro) {
  PriceNotification n;
  n.user_id = std::move(user);
  n.timestamp = ts;
  n.adx_id = "mopub";
  n.price = CleartextPrice{micro, "USD"};
  return n;
}

PriceNotification enc_notif(std::string user, int64_t ts, std::string token) {
  PriceNotification n;
  n.user_id = std::move(user);
  n.timestamp = ts;
  n.adx_id = "rubicon";
  EncryptedPrice p;
  p.token = std::move(token);
  n.price = p;
  return n;
}

}  // namespace

TEST_SUITE_BEGIN("cost");

TEST_CASE("cleartext notifications accumulate at face value") {
  UserCostLedger ledger;
  ledger.user_id = "u1";

  auto n = clear_notif("u1", 100, 950'000);
  n.impression_id = "ab12cd";
  accumulate(ledger, n, make_row("mopub", "madrid", 10, "IAB12"), nullptr);

  REQUIRE(ledger.cleartext.size() == 1);
  CHECK(ledger.cleartext[0].ref == "ab12cd");
  CHECK(ledger.cleartext[0].cpm == 950'000);
  CHECK(ledger.cleartext[0].publisher_iab == "IAB12");
  CHECK(ledger.encrypted.empty());

  // Without an impression id the ref falls back to user plus sequence.
  accumulate(ledger, clear_notif("u1", 200, 50'000),
             make_row("mopub", "madrid", 11), nullptr);
  CHECK(ledger.cleartext[1].ref == "u1#1");

  auto r = report(ledger);
  CHECK(r.user_id == "u1");
  CHECK(r.cleartext_micro == 1'000'000);
  CHECK(r.encrypted_micro == 0);
  CHECK(r.total_micro == 1'000'000);
  CHECK(r.cleartext_count == 2);
  CHECK(r.encrypted_count == 0);
  CHECK(r.avg_cleartext_cpm == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.usd_equivalent == doctest::Approx(0.001).epsilon(1e-12));
}

TEST_CASE("encrypted notifications need a model and take the class representative") {
  UserCostLedger ledger;
  ledger.user_id = "u2";

  CHECK_THROWS_WITH_AS(
      accumulate(ledger, enc_notif("u2", 100, "B6A3F3C19F50C7FD"),
                 make_row("a2", "madrid", 10), nullptr),
      doctest::Contains("ModelRequired"), Error);
  CHECK(ledger.encrypted.empty());

  auto model = fitted_model();
  accumulate(ledger, enc_notif("u2", 100, "B6A3F3C19F50C7FD"),
             make_row("a2", "madrid", 10), &model);
  accumulate(ledger, enc_notif("u2", 200, "VLwbi4K21KFAAAm2"),
             make_row("a2", "paris", 20), &model);

  REQUIRE(ledger.encrypted.size() == 2);
  CHECK(ledger.encrypted[0].estimated_cpm == 3'600'000);
  CHECK(ledger.encrypted[0].features.adx_id == "a2");
  CHECK(ledger.encrypted[1].ref == "u2#1");

  auto r = report(ledger);
  CHECK(r.encrypted_micro == 7'200'000);
  CHECK(r.cleartext_micro == 0);
  CHECK(r.total_micro == 7'200'000);
  CHECK(r.avg_encrypted_cpm == doctest::Approx(3.6).epsilon(1e-12));
}

TEST_CASE("totals add cleartext and encrypted sums exactly") {
  // Entries staged directly: report is pure over ledger contents.
  UserCostLedger ledger;
  ledger.user_id = "u3";
  ledger.cleartext.push_back({"r1", 10, 2'000'000, "IAB12"});
  ledger.encrypted.push_back({"r2", 20, make_row("a1", "rome", 5), 1'000'000});

  auto r = report(ledger);
  CHECK(r.cleartext_micro == 2'000'000);
  CHECK(r.encrypted_micro == 1'000'000);
  CHECK(r.total_micro == 3'000'000);
  CHECK(r.usd_equivalent == doctest::Approx(0.003).epsilon(1e-12));
  CHECK(r.total_micro == r.cleartext_micro + r.encrypted_micro);
}

TEST_CASE("ledger window bounds are inclusive and enforced") {
  UserCostLedger ledger;
  ledger.user_id = "u4";
  ledger.window_start_ms = 1000;
  ledger.window_end_ms = 2000;

  CHECK_THROWS_WITH_AS(accumulate(ledger, clear_notif("u4", 999, 100'000),
                                  make_row("mopub", "madrid", 1), nullptr),
                       doctest::Contains("OutsideWindow"), Error);
  CHECK_THROWS_WITH_AS(accumulate(ledger, clear_notif("u4", 2001, 100'000),
                                  make_row("mopub", "madrid", 1), nullptr),
                       doctest::Contains("OutsideWindow"), Error);
  CHECK(ledger.cleartext.empty());

  accumulate(ledger, clear_notif("u4", 1000, 100'000),
             make_row("mopub", "madrid", 1), nullptr);
  accumulate(ledger, clear_notif("u4", 2000, 100'000),
             make_row("mopub", "madrid", 1), nullptr);
  CHECK(ledger.cleartext.size() == 2);
}

TEST_CASE("mixed streams match partitioned sums under every permutation") {
  auto model = fitted_model();
  const char* adxs[] = {"a0", "a1", "a2", "a3"};
  const char* cities[] = {"madrid", "paris", "rome", "berlin", "lisbon"};
  std::mt19937_64 rng(77);

  std::vector<std::pair<PriceNotification, CoreFeatures>> stream;
  MicroCpm want_clear = 0;
  MicroCpm want_enc = 0;
  for (int i = 0; i < 1000; ++i) {
    if (rng() % 3 == 0) {
      auto f = make_row(adxs[rng() % 4], cities[rng() % 5],
                        static_cast<int>(rng() % 24));
      // Partition oracle: the encrypted side sums the model estimates.
      want_enc += estimate_price(model, f);
      stream.emplace_back(enc_notif("u5", 100 + i, "tok" + std::to_string(i) + "abcde"),
                          std::move(f));
    } else {
      MicroCpm cpm = 1000 + static_cast<MicroCpm>(rng() % 5'000'000);
      want_clear += cpm;
      stream.emplace_back(clear_notif("u5", 100 + i, cpm),
                          make_row("mopub", "madrid", 9));
    }
  }

  auto run = [&](const std::vector<std::pair<PriceNotification, CoreFeatures>>& s) {
    UserCostLedger ledger;
    ledger.user_id = "u5";
    for (const auto& [n, f] : s) accumulate(ledger, n, f, &model);
    return report(ledger);
  };

  auto base = run(stream);
  CHECK(base.cleartext_micro == want_clear);
  CHECK(base.encrypted_micro == want_enc);
  CHECK(base.total_micro == want_clear + want_enc);

  // Any arrival order produces the identical report.
  auto shuffled = stream;
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto r = run(shuffled);
    CHECK(r.cleartext_micro == base.cleartext_micro);
    CHECK(r.encrypted_micro == base.encrypted_micro);
    CHECK(r.total_micro == base.total_micro);
    CHECK(r.cleartext_count == base.cleartext_count);
    CHECK(r.encrypted_count == base.encrypted_count);
  }
}

TEST_CASE("median helper") {
  CHECK(median({}) == 0);
  CHECK(median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
  CHECK(median({7.0}) == doctest::Approx(7.0));
}

TEST_CASE("time shift scales cleartext history by the median ratio") {
  auto coeff = compute_time_shift({0.4, 0.3, 0.5}, {0.55, 0.5, 0.45});
  CHECK(coeff.historical_median_cpm == doctest::Approx(0.4));
  CHECK(coeff.reference_median_cpm == doctest::Approx(0.5));
  CHECK(coeff.ratio == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(coeff.method == "median-ratio");

  UserCostLedger ledger;
  ledger.user_id = "u6";
  ledger.cleartext.push_back({"r1", 1, 300'000, ""});
  ledger.cleartext.push_back({"r2", 2, 400'000, ""});
  ledger.cleartext.push_back({"r3", 3, 500'000, ""});
  ledger.encrypted.push_back({"r4", 4, make_row("a0", "rome", 2), 3'600'000});

  apply_time_shift(ledger, coeff);
  CHECK(ledger.cleartext[0].cpm == 375'000);
  CHECK(ledger.cleartext[1].cpm == 500'000);
  CHECK(ledger.cleartext[2].cpm == 625'000);
  // Encrypted estimates stay untouched by default.
  CHECK(ledger.encrypted[0].estimated_cpm == 3'600'000);

  // Shifted history now has the reference median.
  std::vector<double> shifted;
  for (const auto& e : ledger.cleartext) shifted.push_back(cpm_to_double(e.cpm));
  CHECK(median(shifted) == doctest::Approx(coeff.reference_median_cpm).epsilon(1e-9));

  // Ratio 1 is the identity.
  TimeShiftCoefficient unit;
  apply_time_shift(ledger, unit);
  CHECK(ledger.cleartext[0].cpm == 375'000);
  CHECK(ledger.cleartext[2].cpm == 625'000);

  // The flag extends the correction to encrypted estimates.
  apply_time_shift(ledger, coeff, true);
  CHECK(ledger.encrypted[0].estimated_cpm == 4'500'000);

  CHECK_THROWS_WITH_AS(compute_time_shift({}, {0.5}),
                       doctest::Contains("EmptyWindow"), Error);
  CHECK_THROWS_WITH_AS(compute_time_shift({0.5}, {}),
                       doctest::Contains("EmptyWindow"), Error);
  CHECK_THROWS_WITH_AS(compute_time_shift({0.0}, {0.5}),
                       doctest::Contains("NonPositiveMedian"), Error);
  TimeShiftCoefficient bad;
  bad.ratio = 0;
  CHECK_THROWS_WITH_AS(apply_time_shift(ledger, bad),
                       doctest::Contains("NonPositiveRatio"), Error);
}

TEST_CASE("cohort percentiles follow the nearest-rank rule") {
  // V = i, C = 2i, E = 3i for i in 1..10; each column ranks independently.
  std::vector<UserCostReport> reports;
  for (int i = 10; i >= 1; --i) {
    UserCostReport r;
    r.user_id = "u" + std::to_string(i);
    r.total_micro = static_cast<MicroCpm>(i) * 1'000'000;
    r.cleartext_micro = static_cast<MicroCpm>(2 * i) * 1'000'000;
    r.encrypted_micro = static_cast<MicroCpm>(3 * i) * 1'000'000;
    reports.push_back(r);
  }

  auto s = cohort_stats(reports);
  CHECK(s.n_users == 10);
  REQUIRE(s.percentiles.size() == 7);
  // Nearest rank on n=10: ranks {1,1,3,5,8,9,10}.
  const int want_pct[] = {5, 10, 25, 50, 75, 90, 95};
  const double want_v[] = {1, 1, 3, 5, 8, 9, 10};
  for (size_t i = 0; i < 7; ++i) {
    CHECK(s.percentiles[i].pct == want_pct[i]);
    CHECK(s.percentiles[i].v_cpm == doctest::Approx(want_v[i]));
    CHECK(s.percentiles[i].c_cpm == doctest::Approx(2 * want_v[i]));
    CHECK(s.percentiles[i].e_cpm == doctest::Approx(3 * want_v[i]));
  }

  // Small cohorts keep every point in the CDF.
  REQUIRE(s.v_cdf.size() == 10);
  for (size_t i = 0; i < 10; ++i) {
    CHECK(s.v_cdf[i].value_cpm == doctest::Approx(static_cast<double>(i + 1)));
    CHECK(s.v_cdf[i].fraction == doctest::Approx((i + 1) / 10.0));
  }

  // Large cohort percentiles equal an independent sort-and-pick oracle.
  std::mt19937_64 rng(11);
  std::vector<UserCostReport> big;
  std::vector<double> values;
  for (int i = 0; i < 997; ++i) {
    UserCostReport r;
    r.total_micro = static_cast<MicroCpm>(rng() % 100'000'000);
    r.cleartext_micro = r.total_micro;
    values.push_back(cpm_to_double(r.total_micro));
    big.push_back(r);
  }
  std::sort(values.begin(), values.end());
  auto sb = cohort_stats(big);
  for (const auto& row : sb.percentiles) {
    size_t rank = static_cast<size_t>(
        std::ceil(row.pct / 100.0 * static_cast<double>(values.size())));
    CHECK(row.v_cpm == doctest::Approx(values[rank - 1]));
  }
  CHECK(sb.percentiles[3].v_cpm == doctest::Approx(values[498]));

  // Oversize cohorts downsample the CDF to 512 monotone points.
  std::vector<UserCostReport> huge(2000);
  for (auto& r : huge) r.total_micro = static_cast<MicroCpm>(rng() % 50'000'000);
  auto sh = cohort_stats(huge);
  REQUIRE(sh.v_cdf.size() == 512);
  CHECK(sh.v_cdf.back().fraction == doctest::Approx(1.0));
  for (size_t i = 1; i < sh.v_cdf.size(); ++i) {
    CHECK(sh.v_cdf[i].value_cpm >= sh.v_cdf[i - 1].value_cpm);
    CHECK(sh.v_cdf[i].fraction >= sh.v_cdf[i - 1].fraction);
  }

  // Empty cohort: no rows, no division by zero.
  auto se = cohort_stats({});
  CHECK(se.n_users == 0);
  CHECK(se.percentiles.empty());
  CHECK(se.v_cdf.empty());
  CHECK(se.iab_rows.empty());
}

TEST_CASE("cohort stats group prices by publisher category") {
  UserCostLedger l1;
  l1.user_id = "u1";
  l1.cleartext.push_back({"r1", 1, 1'000'000, "IAB12"});
  l1.cleartext.push_back({"r2", 2, 3'000'000, "IAB12"});
  l1.cleartext.push_back({"r3", 3, 2'000'000, "IAB17"});
  l1.cleartext.push_back({"r4", 4, 9'000'000, ""});  // uncategorized, excluded

  UserCostLedger l2;
  l2.user_id = "u2";
  l2.encrypted.push_back({"r5", 5, make_row("a1", "rome", 4, "IAB12"), 2'000'000});

  std::vector<UserCostReport> reports = {report(l1), report(l2)};
  auto s = cohort_stats(reports, {&l1, nullptr, &l2});

  REQUIRE(s.iab_rows.size() == 2);
  CHECK(s.iab_rows[0].iab == "IAB12");
  CHECK(s.iab_rows[0].count == 3);
  CHECK(s.iab_rows[0].mean_cpm == doctest::Approx(2.0));
  CHECK(s.iab_rows[0].median_cpm == doctest::Approx(2.0));
  CHECK(s.iab_rows[0].min_cpm == doctest::Approx(1.0));
  CHECK(s.iab_rows[0].max_cpm == doctest::Approx(3.0));
  CHECK(s.iab_rows[1].iab == "IAB17");
  CHECK(s.iab_rows[1].count == 1);
  CHECK(s.iab_rows[1].mean_cpm == doctest::Approx(2.0));
}

TEST_CASE("arpu extrapolation divides out the traffic shares") {
  // Default shares multiply to 0.83*0.51*0.40*0.45*0.20 = 0.0152388.
  double denom = 0.83 * 0.51 * 0.40 * 0.45 * 0.20;
  CHECK(extrapolate_arpu(8.0) == doctest::Approx(8.0 / 1000.0 / denom).epsilon(1e-12));
  CHECK(extrapolate_arpu(8.0) == doctest::Approx(0.5249757).epsilon(1e-6));
  CHECK(extrapolate_arpu(102.0) == doctest::Approx(6.6934404).epsilon(1e-6));

  // Both ends stay within 10 percent of the published annual range.
  CHECK(std::abs(extrapolate_arpu(8.0) - 0.54) / 0.54 < 0.10);
  CHECK(std::abs(extrapolate_arpu(102.0) - 6.85) / 6.85 < 0.10);

  CHECK(extrapolate_arpu(0.0) == doctest::Approx(0.0));

  ArpuFactors unit;
  unit.online_share = unit.mobile_share = unit.http_share = 1.0;
  unit.rtb_net_share = unit.rtb_of_total_ads = 1.0;
  CHECK(extrapolate_arpu(50.0, unit) == doctest::Approx(0.05).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(extrapolate_arpu(-1.0),
                       doctest::Contains("NegativeCpm"), Error);
  ArpuFactors bad;
  bad.http_share = 0.0;
  CHECK_THROWS_WITH_AS(extrapolate_arpu(1.0, bad),
                       doctest::Contains("BadArpuFactor"), Error);
  bad.http_share = 1.5;
  CHECK_THROWS_WITH_AS(extrapolate_arpu(1.0, bad),
                       doctest::Contains("BadArpuFactor"), Error);
}

TEST_SUITE_END();
