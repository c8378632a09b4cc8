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
#include <vector>

#include "model/binning.hpp"
#include "model/dataset.hpp"

namespace adcost {

struct ForestHyperParams {
  int n_trees = 100;
  int max_depth = 0;  // 0 = unbounded
  int min_leaf = 5;
  int features_per_split = 0;  // 0 = ceil(sqrt(encoded dims))
  bool regression = false;
};

// Internal nodes split either on one categorical level (one-hot equality:
// mismatch goes left) or on a numeric threshold (value <= code goes left).
// A node with feature < 0 is a leaf; classification leaves keep exact
// integer class counts.
struct TreeNode {
  std::int16_t feature = -1;
  std::uint16_t code = 0;
  bool numeric = false;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::vector<std::int64_t> counts;
  double value = 0;  // regression leaf mean
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
};

struct TrainingMeta {
  std::int64_t n_rows = 0;
  double oob_error = 0;
  std::string notes;
};

struct RandomForestModel {
  FeatureSchema schema;
  PriceBinning binning;
  ForestHyperParams hp;
  std::uint64_t seed = 0;
  int n_classes = 0;
  std::vector<DecisionTree> trees;
  TrainingMeta meta;
};

// Deterministic given (data, hp, seed): tree t draws its bootstrap and
// split candidates from an RNG keyed by seed and t. Throws
// Error(Data, "SingleClassData") for classification on one class.
RandomForestModel fit_forest(const Dataset& data, const ForestHyperParams& hp,
                             std::uint64_t seed);

size_t tree_leaf(const DecisionTree& tree, const std::uint16_t* codes);

// Majority vote across trees; ties break toward the lower class id.
int predict_class(const RandomForestModel& m, const std::uint16_t* codes);
int predict_class(const RandomForestModel& m, const CoreFeatures& s);

// Mean of per-tree leaf class distributions, one entry per class.
std::vector<double> predict_scores(const RandomForestModel& m,
                                   const std::uint16_t* codes);

double predict_regression(const RandomForestModel& m, const std::uint16_t* codes);

// Representative CPM of the predicted class (micro-CPM).
MicroCpm estimate_price(const RandomForestModel& m, const CoreFeatures& s);

// Encodes with the model's schema; unknown levels land on "other".
std::vector<std::uint16_t> encode_for_model(const RandomForestModel& m,
                                            const CoreFeatures& s);

}  // namespace adcost
