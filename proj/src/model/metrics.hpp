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

#include "model/forest.hpp"

namespace adcost {

// All rate fields are class-support-weighted averages; note that the
// weighted recall (= tp_rate) of a multiclass confusion matrix equals
// plain accuracy.
struct EvalMetrics {
  double tp_rate = 0;
  double fp_rate = 0;
  double precision = 0;
  double recall = 0;
  double auc_roc = 0;
  double oob_error = 0;
  std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]

  double accuracy() const;
};

using Confusion = std::vector<std::vector<std::int64_t>>;

Confusion make_confusion(int k);
void add_prediction(Confusion& c, int truth, int predicted);

// Fills tp/fp/precision/recall from the matrix; auc and oob untouched.
EvalMetrics metrics_from_confusion(const Confusion& confusion);

// Rank-based AUC with midrank tie correction over raw scores.
double auc_binary(const std::vector<double>& positives,
                  const std::vector<double>& negatives);

// One-vs-rest AUC per class, weighted by class support. Classes without
// both positives and negatives carry no weight.
double weighted_auc(const std::vector<int>& labels,
                    const std::vector<std::vector<double>>& scores, int n_classes);

// Stratified k-fold cross validation repeated `runs` times; confusions
// pool across folds and runs, AUC averages per run. oob_error averages
// over the fold models. Throws Error(Data, "InsufficientClassSupport")
// when any class has fewer samples than folds.
EvalMetrics evaluate(const Dataset& data, const ForestHyperParams& hp,
                     int folds, int runs, std::uint64_t seed);

// Train-on/test-on split evaluation used by selection and quick checks.
EvalMetrics evaluate_split(const Dataset& train, const Dataset& test,
                           const ForestHyperParams& hp, std::uint64_t seed);

}  // namespace adcost
