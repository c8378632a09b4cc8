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

#include "model/selection.hpp"

#include <algorithm>
#include <random>

#include "common/error.hpp"

namespace adcost {
namespace {

constexpr double kMaxPrecisionLoss = 0.02;
constexpr double kMaxRecallLoss = 0.06;

struct SplitIndices {
  std::vector<std::int32_t> train;
  std::vector<std::int32_t> test;
};

// Stratified 70/30 split, deterministic in the seed.
SplitIndices make_split(const Dataset& data, std::uint64_t seed) {
  int k = data.n_classes();
  std::vector<std::vector<std::int32_t>> by_class(static_cast<size_t>(k));
  for (size_t i = 0; i < data.labels.size(); ++i)
    by_class[static_cast<size_t>(data.labels[i])].push_back(
        static_cast<std::int32_t>(i));
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  SplitIndices out;
  for (auto& cls : by_class) {
    for (size_t i = cls.size(); i > 1; --i) std::swap(cls[i - 1], cls[rng() % i]);
    size_t n_test = cls.size() * 3 / 10;
    for (size_t i = 0; i < cls.size(); ++i)
      (i < n_test ? out.test : out.train).push_back(cls[i]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace

FeatureSelectionReport select_features(const Dataset& data,
                                       const ForestHyperParams& hp,
                                       std::uint64_t seed) {
  FeatureSelectionReport report;
  for (char g = 'A'; g <= 'H'; ++g) report.group_members[g] = {};
  for (const auto& f : data.schema.features)
    report.group_members[f.group].push_back(f.name);

  std::vector<char> present_groups;
  for (const auto& [g, members] : report.group_members)
    if (!members.empty()) present_groups.push_back(g);
  if (present_groups.empty())
    throw_data("EmptySchema", "selection needs at least one feature");

  auto split = make_split(data, seed);
  Dataset train_full = data.subset(split.train);
  Dataset test_full = data.subset(split.test);

  auto eval_subset = [&](const std::vector<size_t>& feature_idx) {
    Dataset train = train_full.keep_features(feature_idx);
    Dataset test = test_full.keep_features(feature_idx);
    return evaluate_split(train, test, hp, seed);
  };

  std::vector<size_t> all_features(data.n_features());
  for (size_t i = 0; i < all_features.size(); ++i) all_features[i] = i;
  EvalMetrics base = eval_subset(all_features);
  report.base_precision = base.precision;
  report.base_recall = base.recall;

  // Majority-class share: a baseline this weak means labels carry no
  // signal and subset deltas are noise.
  std::vector<std::int64_t> support(static_cast<size_t>(data.n_classes()), 0);
  for (int l : data.labels) ++support[static_cast<size_t>(l)];
  std::int64_t max_support = 0;
  for (auto s : support) max_support = std::max(max_support, s);
  double majority_share =
      static_cast<double>(max_support) / static_cast<double>(data.labels.size());
  if (base.precision <= majority_share + 0.05) {
    report.chance_level = true;
    for (const auto& f : data.schema.features) report.chosen.push_back(f.name);
    for (char g : present_groups) report.chosen_groups.push_back(g);
    return report;
  }

  size_t n_groups = present_groups.size();
  size_t n_subsets = (size_t{1} << n_groups) - 1;
  struct Scored {
    size_t mask;
    size_t n_features;
    double precision;
    double recall;
  };
  std::vector<Scored> passing;

  for (size_t mask = 1; mask <= n_subsets; ++mask) {
    std::vector<size_t> feature_idx;
    std::string group_names;
    for (size_t b = 0; b < n_groups; ++b) {
      if (!(mask & (size_t{1} << b))) continue;
      group_names.push_back(present_groups[b]);
    }
    for (size_t i = 0; i < data.n_features(); ++i) {
      if (group_names.find(data.schema.features[i].group) != std::string::npos)
        feature_idx.push_back(i);
    }
    EvalMetrics m = eval_subset(feature_idx);
    SubsetEval cand;
    cand.groups = group_names;
    for (size_t i : feature_idx) cand.features.push_back(data.schema.features[i].name);
    cand.precision = m.precision;
    cand.recall = m.recall;
    report.candidates.push_back(cand);
    if (base.precision - m.precision < kMaxPrecisionLoss &&
        base.recall - m.recall < kMaxRecallLoss) {
      passing.push_back({mask, feature_idx.size(), m.precision, m.recall});
    }
  }

  // The all-groups mask trails the loop with loss exactly zero, so
  // `passing` is never empty: "else full set" falls out naturally.
  std::sort(passing.begin(), passing.end(), [](const Scored& a, const Scored& b) {
    if (a.n_features != b.n_features) return a.n_features < b.n_features;
    return a.mask < b.mask;
  });
  const Scored& winner = passing.front();
  for (size_t b = 0; b < n_groups; ++b)
    if (winner.mask & (size_t{1} << b))
      report.chosen_groups.push_back(present_groups[b]);
  for (size_t i = 0; i < data.n_features(); ++i)
    if (report.chosen_groups.find(data.schema.features[i].group) != std::string::npos)
      report.chosen.push_back(data.schema.features[i].name);
  report.delta_precision = winner.precision - base.precision;
  report.delta_recall = winner.recall - base.recall;
  return report;
}

}  // namespace adcost
