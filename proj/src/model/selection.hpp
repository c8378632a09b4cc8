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

#include "model/metrics.hpp"

namespace adcost {

struct SubsetEval {
  std::string groups;  // e.g. "ACE"
  std::vector<std::string> features;
  double precision = 0;
  double recall = 0;
};

struct FeatureSelectionReport {
  std::map<char, std::vector<std::string>> group_members;  // A-H, possibly empty
  std::vector<SubsetEval> candidates;
  std::vector<std::string> chosen;
  std::string chosen_groups;
  double base_precision = 0;
  double base_recall = 0;
  double delta_precision = 0;  // chosen minus full set
  double delta_recall = 0;
  bool chance_level = false;
};

// Exhaustively scores every non-empty union of the schema's feature
// groups (<= 255 subsets at 8 groups) with a deterministic train/test
// split, then picks the subset with the fewest features whose precision
// trails the full set by under 2 points and recall by under 6 points.
// A full-set precision indistinguishable from the majority-class share
// (within 5 points) marks the data as chance-level and keeps the full set.
FeatureSelectionReport select_features(const Dataset& data,
                                       const ForestHyperParams& hp,
                                       std::uint64_t seed);

}  // namespace adcost
