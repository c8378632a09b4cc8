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

#include "cost/cost.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "common/error.hpp"

namespace adcost {

namespace {

std::string entry_ref(const PriceNotification& n, size_t seq) {
  if (n.impression_id && !n.impression_id->empty()) return *n.impression_id;
  return n.user_id + "#" + std::to_string(seq);
}

}  // namespace

void accumulate(UserCostLedger& ledger, const PriceNotification& n,
                const CoreFeatures& features, const RandomForestModel* model) {
  if (n.timestamp < ledger.window_start_ms || n.timestamp > ledger.window_end_ms) {
    throw_data("OutsideWindow", "notification timestamp outside the ledger window");
  }
  size_t seq = ledger.cleartext.size() + ledger.encrypted.size();
  if (const auto* clear = std::get_if<CleartextPrice>(&n.price)) {
    CleartextEntry e;
    e.ref = entry_ref(n, seq);
    e.timestamp_ms = n.timestamp;
    e.cpm = clear->cpm;
    e.publisher_iab = features.publisher_iab;
    ledger.cleartext.push_back(std::move(e));
    return;
  }
  if (model == nullptr) {
    throw_data("ModelRequired", "encrypted price for user '" + n.user_id +
                                    "' needs a trained model");
  }
  EncryptedEntry e;
  e.ref = entry_ref(n, seq);
  e.timestamp_ms = n.timestamp;
  e.features = features;
  e.estimated_cpm = estimate_price(*model, features);
  ledger.encrypted.push_back(std::move(e));
}

UserCostReport report(const UserCostLedger& ledger) {
  UserCostReport r;
  r.user_id = ledger.user_id;
  r.window_start_ms = ledger.window_start_ms;
  r.window_end_ms = ledger.window_end_ms;
  for (const auto& e : ledger.cleartext) r.cleartext_micro += e.cpm;
  for (const auto& e : ledger.encrypted) r.encrypted_micro += e.estimated_cpm;
  r.total_micro = r.cleartext_micro + r.encrypted_micro;
  r.usd_equivalent = cpm_to_double(r.total_micro) / 1000.0;
  r.cleartext_count = ledger.cleartext.size();
  r.encrypted_count = ledger.encrypted.size();
  if (r.cleartext_count > 0) {
    r.avg_cleartext_cpm = cpm_to_double(r.cleartext_micro) / static_cast<double>(r.cleartext_count);
  }
  if (r.encrypted_count > 0) {
    r.avg_encrypted_cpm = cpm_to_double(r.encrypted_micro) / static_cast<double>(r.encrypted_count);
  }
  return r;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TimeShiftCoefficient compute_time_shift(const std::vector<double>& historical_cpm,
                                        const std::vector<double>& reference_cpm) {
  if (historical_cpm.empty() || reference_cpm.empty()) {
    throw_data("EmptyWindow", "time-shift needs prices in both windows");
  }
  TimeShiftCoefficient c;
  c.historical_median_cpm = median(historical_cpm);
  c.reference_median_cpm = median(reference_cpm);
  if (!(c.historical_median_cpm > 0) || !(c.reference_median_cpm > 0)) {
    throw_data("NonPositiveMedian", "time-shift medians must be positive");
  }
  c.ratio = c.reference_median_cpm / c.historical_median_cpm;
  return c;
}

void apply_time_shift(UserCostLedger& ledger, const TimeShiftCoefficient& coeff,
                      bool include_encrypted) {
  if (!(coeff.ratio > 0)) throw_data("NonPositiveRatio", "time-shift ratio must be positive");
  for (auto& e : ledger.cleartext) {
    e.cpm = static_cast<MicroCpm>(std::llround(static_cast<double>(e.cpm) * coeff.ratio));
  }
  if (include_encrypted) {
    for (auto& e : ledger.encrypted) {
      e.estimated_cpm =
          static_cast<MicroCpm>(std::llround(static_cast<double>(e.estimated_cpm) * coeff.ratio));
    }
  }
}

namespace {

double nearest_rank(const std::vector<double>& sorted, int pct) {
  size_t n = sorted.size();
  size_t rank = static_cast<size_t>(
      std::ceil(static_cast<double>(pct) / 100.0 * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

std::vector<CdfPoint> build_cdf(const std::vector<double>& sorted) {
  std::vector<CdfPoint> out;
  size_t n = sorted.size();
  if (n == 0) return out;
  constexpr size_t kMaxPoints = 512;
  if (n <= kMaxPoints) {
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      out.push_back({sorted[i], static_cast<double>(i + 1) / static_cast<double>(n)});
    }
    return out;
  }
  out.reserve(kMaxPoints);
  for (size_t i = 0; i < kMaxPoints; ++i) {
    size_t idx = i * (n - 1) / (kMaxPoints - 1);
    out.push_back({sorted[idx], static_cast<double>(idx + 1) / static_cast<double>(n)});
  }
  return out;
}

}  // namespace

CohortSummary cohort_stats(const std::vector<UserCostReport>& reports,
                           const std::vector<const UserCostLedger*>& ledgers) {
  CohortSummary s;
  s.n_users = reports.size();
  if (!reports.empty()) {
    std::vector<double> v, c, e;
    v.reserve(reports.size());
    c.reserve(reports.size());
    e.reserve(reports.size());
    for (const auto& r : reports) {
      v.push_back(cpm_to_double(r.total_micro));
      c.push_back(cpm_to_double(r.cleartext_micro));
      e.push_back(cpm_to_double(r.encrypted_micro));
    }
    std::sort(v.begin(), v.end());
    std::sort(c.begin(), c.end());
    std::sort(e.begin(), e.end());
    for (int pct : {5, 10, 25, 50, 75, 90, 95}) {
      s.percentiles.push_back(
          {pct, nearest_rank(v, pct), nearest_rank(c, pct), nearest_rank(e, pct)});
    }
    s.v_cdf = build_cdf(v);
  }
  std::map<std::string, std::vector<double>> by_iab;
  for (const UserCostLedger* ledger : ledgers) {
    if (ledger == nullptr) continue;
    for (const auto& entry : ledger->cleartext) {
      if (!entry.publisher_iab.empty()) {
        by_iab[entry.publisher_iab].push_back(cpm_to_double(entry.cpm));
      }
    }
    for (const auto& entry : ledger->encrypted) {
      if (!entry.features.publisher_iab.empty()) {
        by_iab[entry.features.publisher_iab].push_back(cpm_to_double(entry.estimated_cpm));
      }
    }
  }
  for (auto& [iab, prices] : by_iab) {
    IabRow row;
    row.iab = iab;
    row.count = prices.size();
    double sum = 0;
    for (double p : prices) sum += p;
    row.mean_cpm = sum / static_cast<double>(prices.size());
    row.median_cpm = median(prices);
    auto [lo, hi] = std::minmax_element(prices.begin(), prices.end());
    row.min_cpm = *lo;
    row.max_cpm = *hi;
    s.iab_rows.push_back(std::move(row));
  }
  return s;
}

double extrapolate_arpu(double annual_cpm_sum, const ArpuFactors& f) {
  if (annual_cpm_sum < 0) throw_usage("NegativeCpm", "cpm sum must be >= 0");
  for (double share : {f.online_share, f.mobile_share, f.http_share,
                       f.rtb_net_share, f.rtb_of_total_ads}) {
    if (!(share > 0) || share > 1) {
      throw_config("BadArpuFactor", "each traffic share must lie in (0, 1]");
    }
  }
  double denom = f.online_share * f.mobile_share * f.http_share * f.rtb_net_share *
                 f.rtb_of_total_ads;
  return (annual_cpm_sum / 1000.0) / denom;
}

}  // namespace adcost
