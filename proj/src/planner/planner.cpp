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

#include "planner/planner.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace adcost {

namespace {

void validate_dims(const std::vector<FilterDimension>& dims) {
  for (const auto& d : dims) {
    if (d.name.empty()) throw_usage("BadDimension", "dimension with empty name");
    if (d.values.empty()) {
      throw_usage("BadDimension", "dimension '" + d.name + "' has no values");
    }
  }
  for (size_t i = 0; i < dims.size(); ++i) {
    for (size_t j = i + 1; j < dims.size(); ++j) {
      if (dims[i].name == dims[j].name) {
        throw_usage("BadDimension", "duplicate dimension '" + dims[i].name + "'");
      }
    }
  }
}

std::vector<CampaignSetup> cross(const std::vector<FilterDimension>& dims) {
  std::vector<CampaignSetup> out;
  if (dims.empty()) return out;
  size_t total = 1;
  for (const auto& d : dims) total *= d.values.size();
  out.reserve(total);
  // Odometer over value indices; the last dimension ticks fastest.
  std::vector<size_t> idx(dims.size(), 0);
  for (size_t row = 0; row < total; ++row) {
    CampaignSetup s;
    for (size_t k = 0; k < dims.size(); ++k) {
      s.assignment[dims[k].name] = dims[k].values[idx[k]];
    }
    out.push_back(std::move(s));
    for (size_t k = dims.size(); k-- > 0;) {
      if (++idx[k] < dims[k].values.size()) break;
      idx[k] = 0;
    }
  }
  return out;
}

double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

}  // namespace

std::vector<CampaignSetup> enumerate_setups(const std::vector<FilterDimension>& dims,
                                            PlanStrategy strategy) {
  validate_dims(dims);
  if (strategy == PlanStrategy::full_cross) return cross(dims);

  static const char* kRequired[] = {"city", "interaction", "tod", "dow", "ad_format"};
  std::vector<FilterDimension> picked;
  for (const char* name : kRequired) {
    auto it = std::find_if(dims.begin(), dims.end(),
                           [&](const FilterDimension& d) { return d.name == name; });
    if (it == dims.end()) {
      throw_usage("MissingDimension",
                  std::string("strategy needs dimension '") + name + "'");
    }
    picked.push_back(*it);
  }
  return cross(picked);
}

double z_score(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw_usage("BadAlpha", "alpha must lie in (0, 1)");
  }
  // Solve P(|Z| <= z) = 1 - alpha, i.e. cdf(z) = 1 - alpha/2.
  double target = 1.0 - alpha / 2.0;
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double margin_of_error(const SampleSizeParams& p) {
  if (p.n <= 0) throw_usage("BadSampleSize", "n must be positive");
  if (!(p.std_cpm > 0)) throw_usage("BadSampleSize", "std must be positive");
  return z_score(p.alpha) * p.std_cpm / std::sqrt(static_cast<double>(p.n));
}

long long required_n(const SampleSizeParams& p) {
  if (!(p.d > 0)) throw_usage("BadSampleSize", "margin must be positive");
  if (!(p.std_cpm > 0)) throw_usage("BadSampleSize", "std must be positive");
  double z = z_score(p.alpha);
  double x = z * p.std_cpm / p.d;
  // Nudge below the ULP noise from z's bisection so exact squares stay exact.
  return static_cast<long long>(std::ceil(x * x - 1e-9));
}

double budget_usd(size_t setup_count, long long impressions_per_setup,
                  double max_bid_cpm) {
  if (impressions_per_setup < 0) throw_usage("BadSampleSize", "impressions must be >= 0");
  if (max_bid_cpm < 0) throw_usage("BadSampleSize", "max bid must be >= 0");
  return static_cast<double>(setup_count) *
         static_cast<double>(impressions_per_setup) * max_bid_cpm / 1000.0;
}

std::vector<FilterDimension> default_dimensions() {
  return {
      {"city", {"Madrid", "Barcelona", "Valencia", "Seville"}},
      {"interaction", {"app", "mobile_web"}},
      {"tod", {"12am-9am", "9am-6pm", "6pm-12am"}},
      {"dow", {"weekday", "weekend"}},
      {"ad_format", {"320x50", "300x250", "320x480"}},
      {"device", {"smartphone", "tablet"}},
      {"os", {"ios", "android"}},
      {"adx", {"mopub", "openx", "rubicon", "doubleclick", "pulsepoint"}},
  };
}

}  // namespace adcost
