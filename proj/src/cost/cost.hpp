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

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "common/money.hpp"
#include "features/features.hpp"
#include "model/forest.hpp"
#include "nurl/nurl.hpp"

namespace adcost {

// One cleartext charge observed for a user. publisher_iab feeds the
// per-category cohort tables and may be empty.
struct CleartextEntry {
  std::string ref;
  int64_t timestamp_ms = 0;
  MicroCpm cpm = 0;
  std::string publisher_iab;
};

// One encrypted charge with the features it was estimated from.
struct EncryptedEntry {
  std::string ref;
  int64_t timestamp_ms = 0;
  CoreFeatures features;
  MicroCpm estimated_cpm = 0;
};

// Per-user accumulation window. Sums are kept in integer micro CPM so
// totals are exact and independent of arrival order.
struct UserCostLedger {
  std::string user_id;
  int64_t window_start_ms = std::numeric_limits<int64_t>::min();
  int64_t window_end_ms = std::numeric_limits<int64_t>::max();
  std::vector<CleartextEntry> cleartext;
  std::vector<EncryptedEntry> encrypted;
};

struct UserCostReport {
  std::string user_id;
  MicroCpm cleartext_micro = 0;   // C
  MicroCpm encrypted_micro = 0;   // E
  MicroCpm total_micro = 0;       // V = C + E
  double usd_equivalent = 0;      // V / 1000, at $1 per CPM point
  size_t cleartext_count = 0;
  size_t encrypted_count = 0;
  double avg_cleartext_cpm = 0;
  double avg_encrypted_cpm = 0;
  int64_t window_start_ms = 0;
  int64_t window_end_ms = 0;
};

struct TimeShiftCoefficient {
  double ratio = 1.0;
  double historical_median_cpm = 0;
  double reference_median_cpm = 0;
  std::string method = "median-ratio";
};

struct ArpuFactors {
  double online_share = 0.83;
  double mobile_share = 0.51;
  double http_share = 0.40;
  double rtb_net_share = 0.45;
  double rtb_of_total_ads = 0.20;
};

struct PercentileRow {
  int pct = 0;
  double v_cpm = 0;
  double c_cpm = 0;
  double e_cpm = 0;
};

struct CdfPoint {
  double value_cpm = 0;
  double fraction = 0;
};

struct IabRow {
  std::string iab;
  size_t count = 0;
  double mean_cpm = 0;
  double median_cpm = 0;
  double min_cpm = 0;
  double max_cpm = 0;
};

struct CohortSummary {
  size_t n_users = 0;
  std::vector<PercentileRow> percentiles;  // pcts 5,10,25,50,75,90,95
  std::vector<CdfPoint> v_cdf;
  std::vector<IabRow> iab_rows;
};

// Appends one notification. Cleartext prices land at face value; encrypted
// tokens are estimated from `features` through the model.
// Throws Error(Data, "ModelRequired") for an encrypted price with no model
// and Error(Data, "OutsideWindow") for a timestamp outside the ledger window.
void accumulate(UserCostLedger& ledger, const PriceNotification& n,
                const CoreFeatures& features, const RandomForestModel* model);

UserCostReport report(const UserCostLedger& ledger);

// ratio = median(reference) / median(historical), both in CPM.
TimeShiftCoefficient compute_time_shift(const std::vector<double>& historical_cpm,
                                        const std::vector<double>& reference_cpm);

// Multiplies stored cleartext CPMs by coeff.ratio (rounded to micro CPM).
// Encrypted estimates are corrected only when include_encrypted is set.
void apply_time_shift(UserCostLedger& ledger, const TimeShiftCoefficient& coeff,
                      bool include_encrypted = false);

// Percentiles use the nearest-rank method on sorted values. The CDF is
// downsampled to at most 512 points for large cohorts.
CohortSummary cohort_stats(const std::vector<UserCostReport>& reports,
                           const std::vector<const UserCostLedger*>& ledgers = {});

// USD = (cpm_sum / 1000) / (product of the traffic share factors).
double extrapolate_arpu(double annual_cpm_sum, const ArpuFactors& f = {});

double median(std::vector<double> values);  // empty input -> 0

}  // namespace adcost
