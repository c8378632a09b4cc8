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

#include <map>
#include <string>
#include <vector>

namespace adcost {

struct FilterDimension {
  std::string name;
  std::vector<std::string> values;
};

struct CampaignSetup {
  std::map<std::string, std::string> assignment;

  bool operator==(const CampaignSetup&) const = default;
};

struct SampleSizeParams {
  double std_cpm = 0;
  double alpha = 0.05;
  int n = 0;        // setup count, for margin_of_error
  double d = 0;     // margin of error (CPM), for required_n
  double mean_cpm = 0;  // reporting only
};

enum class PlanStrategy { full_cross, paper_144 };

// full_cross: cartesian product of all dimensions, lexicographic in the
// given dimension order with the last dimension varying fastest.
// paper_144: crosses exactly the dimensions named city, interaction, tod,
// dow, ad_format; throws Error(Usage, "MissingDimension") when one is
// absent. The stock dimension set sizes them 4*2*3*2*3 = 144.
std::vector<CampaignSetup> enumerate_setups(const std::vector<FilterDimension>& dims,
                                            PlanStrategy strategy);

// Two-sided normal quantile for significance alpha, found by bisection.
double z_score(double alpha);

double margin_of_error(const SampleSizeParams& p);  // Z*std/sqrt(n)
long long required_n(const SampleSizeParams& p);    // ceil((Z*std/d)^2)

// |setups| * impressions * max_bid_cpm / 1000, in USD.
double budget_usd(size_t setup_count, long long impressions_per_setup,
                  double max_bid_cpm);

// Table-style default dimensions (four cities, two interactions, three
// time buckets, two day kinds, three ad formats, plus device/os/adx for
// full crosses).
std::vector<FilterDimension> default_dimensions();

}  // namespace adcost
