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

#include "model/metrics.hpp"

#include <algorithm>
#include <random>

#include "common/error.hpp"

namespace adcost {

double EvalMetrics::accuracy() const {
  std::int64_t diag = 0, total = 0;
  for (size_t i = 0; i < confusion.size(); ++i) {
    for (size_t j = 0; j < confusion[i].size(); ++j) {
      total += confusion[i][j];
      if (i == j) diag += confusion[i][j];
    }
  }
  return total == 0 ? 0 : static_cast<double>(diag) / static_cast<double>(total);
}

Confusion make_confusion(int k) {
  return Confusion(static_cast<size_t>(k),
                   std::vector<std::int64_t>(static_cast<size_t>(k), 0));
}

void add_prediction(Confusion& c, int truth, int predicted) {
  c[static_cast<size_t>(truth)][static_cast<size_t>(predicted)] += 1;
}

EvalMetrics metrics_from_confusion(const Confusion& confusion) {
  EvalMetrics m;
  m.confusion = confusion;
  size_t k = confusion.size();
  std::vector<std::int64_t> support(k, 0), predicted(k, 0);
  std::int64_t total = 0;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) {
      support[i] += confusion[i][j];
      predicted[j] += confusion[i][j];
      total += confusion[i][j];
    }
  }
  if (total == 0) return m;

  double tp_rate = 0, fp_rate = 0, precision = 0, recall = 0;
  for (size_t c = 0; c < k; ++c) {
    double w = static_cast<double>(support[c]) / static_cast<double>(total);
    if (w == 0) continue;
    double tp = static_cast<double>(confusion[c][c]);
    double fp = static_cast<double>(predicted[c]) - tp;
    double neg = static_cast<double>(total - support[c]);
    double rc = tp / static_cast<double>(support[c]);
    double pr = predicted[c] == 0 ? 0 : tp / static_cast<double>(predicted[c]);
    double fpr = neg == 0 ? 0 : fp / neg;
    tp_rate += w * rc;
    recall += w * rc;
    precision += w * pr;
    fp_rate += w * fpr;
  }
  m.tp_rate = tp_rate;
  m.recall = recall;
  m.precision = precision;
  m.fp_rate = fp_rate;
  return m;
}

double auc_binary(const std::vector<double>& positives,
                  const std::vector<double>& negatives) {
  if (positives.empty() || negatives.empty()) return 0.5;
  struct Item {
    double score;
    bool pos;
  };
  std::vector<Item> items;
  items.reserve(positives.size() + negatives.size());
  for (double s : positives) items.push_back({s, true});
  for (double s : negatives) items.push_back({s, false});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.score < b.score; });

  // Midranks: tied scores share the average of their rank range.
  double rank_sum_pos = 0;
  size_t i = 0;
  while (i < items.size()) {
    size_t j = i;
    while (j < items.size() && items[j].score == items[i].score) ++j;
    double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t t = i; t < j; ++t)
      if (items[t].pos) rank_sum_pos += midrank;
    i = j;
  }
  double np = static_cast<double>(positives.size());
  double nn = static_cast<double>(negatives.size());
  return (rank_sum_pos - np * (np + 1) / 2.0) / (np * nn);
}

double weighted_auc(const std::vector<int>& labels,
                    const std::vector<std::vector<double>>& scores, int n_classes) {
  std::vector<std::int64_t> support(static_cast<size_t>(n_classes), 0);
  for (int l : labels) ++support[static_cast<size_t>(l)];

  double weighted = 0, weight_total = 0;
  for (int c = 0; c < n_classes; ++c) {
    auto pos_n = support[static_cast<size_t>(c)];
    auto neg_n = static_cast<std::int64_t>(labels.size()) - pos_n;
    if (pos_n == 0 || neg_n == 0) continue;
    std::vector<double> pos, neg;
    pos.reserve(static_cast<size_t>(pos_n));
    neg.reserve(static_cast<size_t>(neg_n));
    for (size_t i = 0; i < labels.size(); ++i) {
      double s = scores[i][static_cast<size_t>(c)];
      (labels[i] == c ? pos : neg).push_back(s);
    }
    double w = static_cast<double>(pos_n);
    weighted += w * auc_binary(pos, neg);
    weight_total += w;
  }
  return weight_total == 0 ? 0.5 : weighted / weight_total;
}

EvalMetrics evaluate_split(const Dataset& train, const Dataset& test,
                           const ForestHyperParams& hp, std::uint64_t seed) {
  auto model = fit_forest(train, hp, seed);
  int k = std::max(train.n_classes(), test.n_classes());
  Confusion confusion = make_confusion(k);
  std::vector<std::vector<double>> scores;
  scores.reserve(test.rows());
  for (size_t r = 0; r < test.rows(); ++r) {
    const std::uint16_t* codes = test.row(r);
    add_prediction(confusion, test.labels[r], predict_class(model, codes));
    auto s = predict_scores(model, codes);
    s.resize(static_cast<size_t>(k), 0);
    scores.push_back(std::move(s));
  }
  EvalMetrics m = metrics_from_confusion(confusion);
  m.auc_roc = weighted_auc(test.labels, scores, k);
  m.oob_error = model.meta.oob_error;
  return m;
}

EvalMetrics evaluate(const Dataset& data, const ForestHyperParams& hp,
                     int folds, int runs, std::uint64_t seed) {
  if (folds < 2) throw_usage("BadFoldCount", "cross validation needs >= 2 folds");
  if (runs < 1) throw_usage("BadRunCount", "cross validation needs >= 1 run");
  int k = data.n_classes();
  std::vector<std::vector<std::int32_t>> by_class(static_cast<size_t>(k));
  for (size_t i = 0; i < data.labels.size(); ++i)
    by_class[static_cast<size_t>(data.labels[i])].push_back(
        static_cast<std::int32_t>(i));
  for (const auto& cls : by_class) {
    if (!cls.empty() && cls.size() < static_cast<size_t>(folds))
      throw_data("InsufficientClassSupport",
                 "every class needs at least `folds` samples");
  }

  Confusion pooled = make_confusion(k);
  double auc_sum = 0, oob_sum = 0;
  int forest_count = 0;

  for (int run = 0; run < runs; ++run) {
    std::mt19937_64 rng(seed ^ (0xD6E8FEB86659FD93ULL * static_cast<std::uint64_t>(run + 1)));

    // Stratified deal: shuffle within class, then round-robin over folds.
    std::vector<std::vector<std::int32_t>> fold_members(static_cast<size_t>(folds));
    for (auto cls : by_class) {
      for (size_t i = cls.size(); i > 1; --i)
        std::swap(cls[i - 1], cls[rng() % i]);
      for (size_t i = 0; i < cls.size(); ++i)
        fold_members[i % static_cast<size_t>(folds)].push_back(cls[i]);
    }

    std::vector<int> run_labels;
    std::vector<std::vector<double>> run_scores;

    for (int f = 0; f < folds; ++f) {
      std::vector<std::int32_t> train_idx, test_idx;
      for (int g = 0; g < folds; ++g) {
        const auto& members = fold_members[static_cast<size_t>(g)];
        auto& dst = (g == f) ? test_idx : train_idx;
        dst.insert(dst.end(), members.begin(), members.end());
      }
      if (test_idx.empty()) continue;
      std::sort(train_idx.begin(), train_idx.end());
      std::sort(test_idx.begin(), test_idx.end());

      Dataset train = data.subset(train_idx);
      Dataset test = data.subset(test_idx);
      auto model = fit_forest(
          train, hp,
          seed ^ (0xA0761D6478BD642FULL *
                  static_cast<std::uint64_t>(run * folds + f + 1)));
      oob_sum += model.meta.oob_error;
      ++forest_count;

      for (size_t r = 0; r < test.rows(); ++r) {
        const std::uint16_t* codes = test.row(r);
        add_prediction(pooled, test.labels[r], predict_class(model, codes));
        auto s = predict_scores(model, codes);
        s.resize(static_cast<size_t>(k), 0);
        run_labels.push_back(test.labels[r]);
        run_scores.push_back(std::move(s));
      }
    }
    auc_sum += weighted_auc(run_labels, run_scores, k);
  }

  EvalMetrics m = metrics_from_confusion(pooled);
  m.auc_roc = auc_sum / static_cast<double>(runs);
  m.oob_error = forest_count == 0 ? 0 : oob_sum / static_cast<double>(forest_count);
  return m;
}

}  // namespace adcost
