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

#include <vector>

#include "common/money.hpp"

namespace adcost {

// Price discretization in natural-log CPM space. Classes are the k
// intervals cut by k-1 strictly increasing boundaries; representatives are
// per-class median training prices.
struct PriceBinning {
  int k = 4;
  std::vector<double> boundaries;          // log-CPM cut points, size k-1
  std::vector<MicroCpm> representatives;   // size k, strictly increasing
  bool degenerate = false;  // fewer distinct prices than requested classes

  int class_of_log(double log_cpm) const;
  int class_of(MicroCpm cpm) const;
};

// Natural log elementwise; throws Error(Data, "NonPositivePrice").
std::vector<double> log_normalize(const std::vector<MicroCpm>& prices);

// Grid search over equal-width and equal-frequency candidates in log space
// plus coordinate-wise perturbations, scored by the leave-one-out
// log-likelihood of the k-bin histogram estimator. Candidates leaving any
// class under 5% of the sample are discarded; near-ties (within 0.2%
// relative score) break toward the most balanced split, then toward the
// earlier candidate. Fewer than k distinct prices triggers the degenerate
// fallback: equal-frequency over the distinct values.
PriceBinning fit_binning(const std::vector<MicroCpm>& prices, int k = 4);

}  // namespace adcost
