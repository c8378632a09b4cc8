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

#include "model/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"

namespace adcost {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Candidate {
  std::vector<double> boundaries;
  double score = kNegInf;
  double max_share = 1.0;
};

std::vector<std::int64_t> bin_counts(const std::vector<double>& sorted_logs,
                                     const std::vector<double>& boundaries) {
  std::vector<std::int64_t> counts(boundaries.size() + 1, 0);
  size_t prev = 0;
  for (size_t j = 0; j < boundaries.size(); ++j) {
    size_t idx = static_cast<size_t>(
        std::upper_bound(sorted_logs.begin(), sorted_logs.end(), boundaries[j]) -
        sorted_logs.begin());
    counts[j] = static_cast<std::int64_t>(idx - prev);
    prev = idx;
  }
  counts.back() = static_cast<std::int64_t>(sorted_logs.size() - prev);
  return counts;
}

// Leave-one-out log-likelihood of the histogram density with the given
// cut points; -inf when any class misses the 5% mass floor.
double loo_score(const std::vector<double>& sorted_logs,
                 const std::vector<double>& boundaries, double lo, double hi,
                 double* max_share_out) {
  const auto n = static_cast<std::int64_t>(sorted_logs.size());
  auto counts = bin_counts(sorted_logs, boundaries);
  const auto floor_count = static_cast<std::int64_t>(
      std::ceil(0.05 * static_cast<double>(n)));
  double max_share = 0;
  for (auto c : counts) {
    if (c < std::max<std::int64_t>(2, floor_count)) return kNegInf;
    max_share = std::max(max_share, static_cast<double>(c) / static_cast<double>(n));
  }
  if (max_share_out) *max_share_out = max_share;

  double ll = 0;
  for (size_t j = 0; j < counts.size(); ++j) {
    double left = j == 0 ? lo : boundaries[j - 1];
    double right = j == counts.size() - 1 ? hi : boundaries[j];
    double w = right - left;
    if (w <= 0) return kNegInf;
    double c = static_cast<double>(counts[j]);
    ll += c * (std::log(c - 1) - std::log(static_cast<double>(n - 1) * w));
  }
  return ll;
}

bool strictly_increasing(const std::vector<double>& b, double lo, double hi) {
  double prev = lo;
  for (double x : b) {
    if (x <= prev) return false;
    prev = x;
  }
  return prev < hi;
}

std::vector<double> equal_width(double lo, double hi, int k) {
  std::vector<double> b;
  for (int i = 1; i < k; ++i)
    b.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k));
  return b;
}

std::vector<double> equal_frequency(const std::vector<double>& sorted_logs, int k) {
  std::vector<double> b;
  size_t n = sorted_logs.size();
  for (int i = 1; i < k; ++i) {
    size_t idx = n * static_cast<size_t>(i) / static_cast<size_t>(k);
    if (idx == 0 || idx >= n) continue;
    // Midpoint between straddling order statistics keeps samples off cuts.
    b.push_back((sorted_logs[idx - 1] + sorted_logs[idx]) / 2.0);
  }
  return b;
}

void coordinate_refine(Candidate& cand, const std::vector<double>& sorted_logs,
                       double lo, double hi) {
  static constexpr double kOffsets[] = {-0.5, -0.25, -0.1, 0.1, 0.25, 0.5};
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t j = 0; j < cand.boundaries.size(); ++j) {
      double left = j == 0 ? lo : cand.boundaries[j - 1];
      double right = j + 1 == cand.boundaries.size() ? hi : cand.boundaries[j + 1];
      double gap = std::min(cand.boundaries[j] - left, right - cand.boundaries[j]);
      for (double off : kOffsets) {
        std::vector<double> trial = cand.boundaries;
        trial[j] += off * gap;
        if (!strictly_increasing(trial, lo, hi)) continue;
        double share = 1.0;
        double s = loo_score(sorted_logs, trial, lo, hi, &share);
        if (s > cand.score) {
          cand.boundaries = std::move(trial);
          cand.score = s;
          cand.max_share = share;
        }
      }
    }
  }
}

std::vector<MicroCpm> medians_per_class(const std::vector<MicroCpm>& prices,
                                        const PriceBinning& binning) {
  std::vector<std::vector<MicroCpm>> classes(static_cast<size_t>(binning.k));
  for (MicroCpm p : prices)
    classes[static_cast<size_t>(binning.class_of(p))].push_back(p);
  std::vector<MicroCpm> reps;
  for (auto& cls : classes) {
    if (cls.empty()) throw_data("EmptyClass", "price class received no samples");
    std::sort(cls.begin(), cls.end());
    reps.push_back(cls[(cls.size() - 1) / 2]);  // lower median: an observed price
  }
  return reps;
}

}  // namespace

int PriceBinning::class_of_log(double log_cpm) const {
  return static_cast<int>(std::upper_bound(boundaries.begin(), boundaries.end(),
                                           log_cpm) -
                          boundaries.begin());
}

int PriceBinning::class_of(MicroCpm cpm) const {
  return class_of_log(std::log(cpm_to_double(cpm)));
}

std::vector<double> log_normalize(const std::vector<MicroCpm>& prices) {
  std::vector<double> out;
  out.reserve(prices.size());
  for (MicroCpm p : prices) {
    if (p <= 0) throw_data("NonPositivePrice", "log transform needs positive prices");
    out.push_back(std::log(cpm_to_double(p)));
  }
  return out;
}

PriceBinning fit_binning(const std::vector<MicroCpm>& prices, int k) {
  if (k < 1) throw_usage("BadClassCount", "class count must be >= 1");
  if (prices.size() < static_cast<size_t>(10 * k))
    throw_data("TooFewSamples", "binning needs at least 10*k samples");

  std::vector<double> logs = log_normalize(prices);
  std::sort(logs.begin(), logs.end());

  std::vector<double> distinct = logs;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  PriceBinning binning;
  if (static_cast<int>(distinct.size()) < k) {
    // Degenerate fallback: one class per distinct value, cut at midpoints.
    binning.degenerate = true;
    binning.k = static_cast<int>(distinct.size());
    for (size_t i = 0; i + 1 < distinct.size(); ++i)
      binning.boundaries.push_back((distinct[i] + distinct[i + 1]) / 2.0);
    binning.representatives = medians_per_class(prices, binning);
    return binning;
  }

  binning.k = k;
  if (k == 1) {
    binning.representatives = medians_per_class(prices, binning);
    return binning;
  }

  const double lo = logs.front();
  const double hi = logs.back();

  std::vector<Candidate> candidates;
  auto push = [&](std::vector<double> b) {
    if (!strictly_increasing(b, lo, hi)) return;
    Candidate c;
    c.boundaries = std::move(b);
    c.score = loo_score(logs, c.boundaries, lo, hi, &c.max_share);
    coordinate_refine(c, logs, lo, hi);
    candidates.push_back(std::move(c));
  };

  auto ew = equal_width(lo, hi, k);
  auto ef = equal_frequency(logs, k);
  push(ew);
  push(ef);
  if (ew.size() == ef.size() && !ew.empty()) {
    std::vector<double> blend(ew.size());
    for (size_t i = 0; i < ew.size(); ++i) blend[i] = (ew[i] + ef[i]) / 2.0;
    push(blend);
  }

  const Candidate* best = nullptr;
  for (const auto& c : candidates) {
    if (c.score == kNegInf) continue;
    if (!best) {
      best = &c;
      continue;
    }
    double rel = std::abs(best->score) * 0.002;
    if (c.score > best->score + rel) {
      best = &c;
    } else if (std::abs(c.score - best->score) <= rel &&
               c.max_share < best->max_share) {
      best = &c;  // near-tie: prefer the better balanced cut
    }
  }

  if (!best) {
    // Mass too concentrated for k classes at the 5% floor: accept the
    // equal-frequency cut with duplicate boundaries collapsed.
    std::vector<double> b = equal_frequency(logs, k);
    b.erase(std::unique(b.begin(), b.end()), b.end());
    while (!b.empty() && !strictly_increasing(b, lo, hi)) b.pop_back();
    binning.k = static_cast<int>(b.size()) + 1;
    binning.boundaries = std::move(b);
    binning.degenerate = true;
    binning.representatives = medians_per_class(prices, binning);
    return binning;
  }

  binning.boundaries = best->boundaries;
  binning.representatives = medians_per_class(prices, binning);
  return binning;
}

}  // namespace adcost
