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

#include "model/forest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"

namespace adcost {
namespace {

// One encoded dimension: a (feature, level) one-hot pair, or a whole
// numeric feature (level = -1, thresholds searched exhaustively).
struct Dim {
  std::int16_t feature;
  std::int16_t level;
};

std::vector<Dim> enumerate_dims(const FeatureSchema& schema) {
  std::vector<Dim> dims;
  for (size_t f = 0; f < schema.features.size(); ++f) {
    const auto& feat = schema.features[f];
    if (feat.numeric) {
      dims.push_back({static_cast<std::int16_t>(f), -1});
    } else {
      for (size_t l = 0; l < feat.levels.size(); ++l)
        dims.push_back({static_cast<std::int16_t>(f), static_cast<std::int16_t>(l)});
    }
  }
  return dims;
}

// Bounded draws avoid std::uniform_int_distribution, whose output differs
// across standard libraries; determinism matters more than the tiny
// modulo bias here.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

struct Split {
  bool found = false;
  std::int16_t feature = -1;
  std::int16_t level = -1;  // -1 = numeric threshold in `threshold`
  std::uint16_t threshold = 0;
  double score = -1;  // sum over children of (sum of squared counts)/size
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestHyperParams& hp,
              const std::vector<Dim>& dims, int n_classes, std::mt19937_64 rng)
      : data_(data),
        hp_(hp),
        dims_(dims),
        n_classes_(n_classes),
        rng_(std::move(rng)),
        mtry_(hp.features_per_split > 0
                  ? hp.features_per_split
                  : static_cast<int>(std::ceil(
                        std::sqrt(static_cast<double>(data.schema.encoded_dims()))))) {
    max_code_ = 0;
    for (const auto& f : data_.schema.features)
      max_code_ = std::max(max_code_,
                           f.numeric ? f.numeric_max + 1
                                     : static_cast<int>(f.levels.size()));
  }

  DecisionTree build(std::vector<std::int32_t> indices) {
    tree_.nodes.clear();
    build_node(std::move(indices), 0);
    return std::move(tree_);
  }

 private:
  // Returns the index of the created node.
  std::int32_t build_node(std::vector<std::int32_t> indices, int depth) {
    std::int32_t node_id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<std::int64_t> counts(static_cast<size_t>(n_classes_), 0);
    double sum = 0;
    for (auto i : indices) {
      if (hp_.regression)
        sum += data_.targets[static_cast<size_t>(i)];
      else
        ++counts[static_cast<size_t>(data_.labels[static_cast<size_t>(i)])];
    }

    bool stop = indices.size() < 2 * static_cast<size_t>(hp_.min_leaf) ||
                (hp_.max_depth > 0 && depth >= hp_.max_depth);
    if (!stop && !hp_.regression) {
      int present = 0;
      for (auto c : counts) present += c > 0;
      stop = present <= 1;
    }

    Split best;
    if (!stop) best = find_split(indices, counts, sum);
    if (!best.found) {
      make_leaf(node_id, counts, sum, indices.size());
      return node_id;
    }

    // Stable two-way partition: child row order equals parent order.
    std::vector<std::int32_t> left, right;
    left.reserve(indices.size());
    right.reserve(indices.size());
    const auto& feat = data_.schema.features[static_cast<size_t>(best.feature)];
    for (auto i : indices) {
      std::uint16_t v = data_.row(static_cast<size_t>(i))[static_cast<size_t>(best.feature)];
      bool go_left = feat.numeric ? (v <= best.threshold)
                                  : (v != static_cast<std::uint16_t>(best.level));
      (go_left ? left : right).push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    tree_.nodes[static_cast<size_t>(node_id)].feature = best.feature;
    tree_.nodes[static_cast<size_t>(node_id)].numeric = feat.numeric;
    tree_.nodes[static_cast<size_t>(node_id)].code =
        feat.numeric ? best.threshold : static_cast<std::uint16_t>(best.level);
    std::int32_t l = build_node(std::move(left), depth + 1);
    std::int32_t r = build_node(std::move(right), depth + 1);
    tree_.nodes[static_cast<size_t>(node_id)].left = l;
    tree_.nodes[static_cast<size_t>(node_id)].right = r;
    return node_id;
  }

  void make_leaf(std::int32_t node_id, const std::vector<std::int64_t>& counts,
                 double sum, size_t n) {
    auto& node = tree_.nodes[static_cast<size_t>(node_id)];
    if (hp_.regression) {
      node.value = n > 0 ? sum / static_cast<double>(n) : 0;
    } else {
      node.counts = counts;
    }
  }

  Split find_split(const std::vector<std::int32_t>& indices,
                   const std::vector<std::int64_t>& parent_counts,
                   double parent_sum) {
    // Sample mtry dims without replacement, then visit them in index
    // order so tie-breaks are stable.
    size_t total = dims_.size();
    size_t want = std::min<size_t>(static_cast<size_t>(mtry_), total);
    sample_buf_.resize(total);
    for (size_t i = 0; i < total; ++i) sample_buf_[i] = static_cast<std::int32_t>(i);
    for (size_t i = 0; i < want; ++i) {
      size_t j = i + static_cast<size_t>(draw(rng_, total - i));
      std::swap(sample_buf_[i], sample_buf_[j]);
    }
    std::sort(sample_buf_.begin(), sample_buf_.begin() + static_cast<std::ptrdiff_t>(want));

    Split best;
    double parent_score;
    if (hp_.regression) {
      parent_score = parent_sum * parent_sum / static_cast<double>(indices.size());
    } else {
      double s = 0;
      for (auto c : parent_counts) s += static_cast<double>(c) * static_cast<double>(c);
      parent_score = s / static_cast<double>(indices.size());
    }

    std::int16_t hist_feature = -1;
    for (size_t si = 0; si < want; ++si) {
      const Dim& dim = dims_[static_cast<size_t>(sample_buf_[si])];
      if (dim.feature != hist_feature) {
        build_histogram(indices, dim.feature);
        hist_feature = dim.feature;
      }
      if (dim.level >= 0)
        eval_categorical(dim, indices.size(), parent_counts, parent_sum,
                         parent_score, best);
      else
        eval_numeric(dim, indices.size(), parent_counts, parent_sum,
                     parent_score, best);
    }
    return best;
  }

  void build_histogram(const std::vector<std::int32_t>& indices, std::int16_t f) {
    size_t width = static_cast<size_t>(max_code_);
    size_t classes = hp_.regression ? 0 : static_cast<size_t>(n_classes_);
    hist_counts_.assign(width * std::max<size_t>(classes, 1), 0);
    hist_n_.assign(width, 0);
    if (hp_.regression) {
      hist_sum_.assign(width, 0);
    }
    for (auto i : indices) {
      std::uint16_t v = data_.row(static_cast<size_t>(i))[static_cast<size_t>(f)];
      ++hist_n_[v];
      if (hp_.regression) {
        hist_sum_[v] += data_.targets[static_cast<size_t>(i)];
      } else {
        ++hist_counts_[v * classes + static_cast<size_t>(
                                          data_.labels[static_cast<size_t>(i)])];
      }
    }
  }

  void eval_categorical(const Dim& dim, size_t n,
                        const std::vector<std::int64_t>& parent_counts,
                        double parent_sum, double parent_score, Split& best) {
    size_t level = static_cast<size_t>(dim.level);
    std::int64_t n_right = hist_n_[level];
    std::int64_t n_left = static_cast<std::int64_t>(n) - n_right;
    if (n_right < hp_.min_leaf || n_left < hp_.min_leaf) return;

    double score;
    if (hp_.regression) {
      double sum_right = hist_sum_[level];
      double sum_left = parent_sum - sum_right;
      score = sum_left * sum_left / static_cast<double>(n_left) +
              sum_right * sum_right / static_cast<double>(n_right);
    } else {
      size_t classes = static_cast<size_t>(n_classes_);
      double sl = 0, sr = 0;
      for (size_t c = 0; c < classes; ++c) {
        double right = static_cast<double>(hist_counts_[level * classes + c]);
        double left = static_cast<double>(parent_counts[c]) - right;
        sl += left * left;
        sr += right * right;
      }
      score = sl / static_cast<double>(n_left) + sr / static_cast<double>(n_right);
    }
    if (score > parent_score + 1e-9 && score > best.score) {
      best.found = true;
      best.feature = dim.feature;
      best.level = dim.level;
      best.score = score;
    }
  }

  void eval_numeric(const Dim& dim, size_t n,
                    const std::vector<std::int64_t>& parent_counts,
                    double parent_sum, double parent_score, Split& best) {
    const auto& feat = data_.schema.features[static_cast<size_t>(dim.feature)];
    size_t width = static_cast<size_t>(feat.numeric_max) + 1;
    if (hp_.regression) {
      double sum_total = parent_sum;
      std::int64_t n_left = 0;
      double sum_left = 0;
      for (size_t t = 0; t + 1 < width; ++t) {
        n_left += hist_n_[t];
        sum_left += hist_sum_[t];
        std::int64_t n_right = static_cast<std::int64_t>(n) - n_left;
        if (n_left < hp_.min_leaf || n_right < hp_.min_leaf) continue;
        double sum_right = sum_total - sum_left;
        double score = sum_left * sum_left / static_cast<double>(n_left) +
                       sum_right * sum_right / static_cast<double>(n_right);
        if (score > parent_score + 1e-9 && score > best.score) {
          best.found = true;
          best.feature = dim.feature;
          best.level = -1;
          best.threshold = static_cast<std::uint16_t>(t);
          best.score = score;
        }
      }
      return;
    }

    size_t classes = static_cast<size_t>(n_classes_);
    std::vector<double> total(classes, 0), left(classes, 0);
    for (size_t c = 0; c < classes; ++c)
      total[c] = static_cast<double>(parent_counts[c]);
    std::int64_t n_left = 0;
    for (size_t t = 0; t + 1 < width; ++t) {
      n_left += hist_n_[t];
      for (size_t c = 0; c < classes; ++c)
        left[c] += static_cast<double>(hist_counts_[t * classes + c]);
      std::int64_t n_right = static_cast<std::int64_t>(n) - n_left;
      if (n_left < hp_.min_leaf || n_right < hp_.min_leaf) continue;
      double sl = 0, sr = 0;
      for (size_t c = 0; c < classes; ++c) {
        sl += left[c] * left[c];
        double r = total[c] - left[c];
        sr += r * r;
      }
      double score = sl / static_cast<double>(n_left) + sr / static_cast<double>(n_right);
      if (score > parent_score + 1e-9 && score > best.score) {
        best.found = true;
        best.feature = dim.feature;
        best.level = -1;
        best.threshold = static_cast<std::uint16_t>(t);
        best.score = score;
      }
    }
  }

  const Dataset& data_;
  const ForestHyperParams& hp_;
  const std::vector<Dim>& dims_;
  int n_classes_;
  std::mt19937_64 rng_;
  int mtry_;
  int max_code_ = 0;
  DecisionTree tree_;
  std::vector<std::int32_t> sample_buf_;
  std::vector<std::int64_t> hist_counts_;
  std::vector<std::int64_t> hist_n_;
  std::vector<double> hist_sum_;
};

std::mt19937_64 tree_rng(std::uint64_t seed, std::uint64_t tree_index) {
  return std::mt19937_64(seed ^ (0x9E3779B97F4A7C15ULL * (tree_index + 1)));
}

}  // namespace

RandomForestModel fit_forest(const Dataset& data, const ForestHyperParams& hp,
                             std::uint64_t seed) {
  size_t n = data.rows();
  if (n == 0) throw_data("EmptyDataset", "cannot train on zero rows");
  int n_classes = data.n_classes();
  if (!hp.regression) {
    std::vector<std::int64_t> support(static_cast<size_t>(n_classes), 0);
    for (int l : data.labels) ++support[static_cast<size_t>(l)];
    int present = 0;
    for (auto s : support) present += s > 0;
    if (present < 2)
      throw_data("SingleClassData", "training data has fewer than 2 classes");
  }
  if (hp.regression && data.targets.size() != n)
    throw_usage("MissingTargets", "regression mode needs a target per row");

  RandomForestModel model;
  model.schema = data.schema;
  model.hp = hp;
  model.seed = seed;
  model.n_classes = hp.regression ? 0 : n_classes;
  model.meta.n_rows = static_cast<std::int64_t>(n);

  auto dims = enumerate_dims(data.schema);

  // OOB bookkeeping: votes aggregated over trees that did not see the row.
  std::vector<std::int64_t> oob_votes;
  std::vector<double> oob_reg_sum;
  std::vector<std::int32_t> oob_n;
  if (!hp.regression)
    oob_votes.assign(n * static_cast<size_t>(n_classes), 0);
  else
    oob_reg_sum.assign(n, 0);
  oob_n.assign(n, 0);
  std::vector<std::uint8_t> in_bag(n);

  for (int t = 0; t < hp.n_trees; ++t) {
    auto rng = tree_rng(seed, static_cast<std::uint64_t>(t));
    std::vector<std::int32_t> sample(n);
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (size_t i = 0; i < n; ++i) {
      auto idx = static_cast<std::int32_t>(rng() % n);
      sample[i] = idx;
      in_bag[static_cast<size_t>(idx)] = 1;
    }
    TreeBuilder builder(data, hp, dims, n_classes, std::move(rng));
    model.trees.push_back(builder.build(std::move(sample)));

    const auto& tree = model.trees.back();
    for (size_t i = 0; i < n; ++i) {
      if (in_bag[i]) continue;
      size_t leaf = tree_leaf(tree, data.row(i));
      ++oob_n[i];
      if (hp.regression) {
        oob_reg_sum[i] += tree.nodes[leaf].value;
      } else {
        const auto& counts = tree.nodes[leaf].counts;
        int cls = 0;
        for (size_t c = 1; c < counts.size(); ++c)
          if (counts[c] > counts[static_cast<size_t>(cls)]) cls = static_cast<int>(c);
        ++oob_votes[i * static_cast<size_t>(n_classes) + static_cast<size_t>(cls)];
      }
    }
  }

  std::int64_t oob_used = 0, oob_wrong = 0;
  double oob_sq = 0;
  for (size_t i = 0; i < n; ++i) {
    if (oob_n[i] == 0) continue;
    ++oob_used;
    if (hp.regression) {
      double pred = oob_reg_sum[i] / static_cast<double>(oob_n[i]);
      double err = pred - data.targets[i];
      oob_sq += err * err;
    } else {
      int cls = 0;
      for (int c = 1; c < n_classes; ++c)
        if (oob_votes[i * static_cast<size_t>(n_classes) + static_cast<size_t>(c)] >
            oob_votes[i * static_cast<size_t>(n_classes) + static_cast<size_t>(cls)])
          cls = c;
      if (cls != data.labels[i]) ++oob_wrong;
    }
  }
  if (oob_used > 0) {
    model.meta.oob_error = hp.regression
                               ? oob_sq / static_cast<double>(oob_used)
                               : static_cast<double>(oob_wrong) /
                                     static_cast<double>(oob_used);
  }
  return model;
}

size_t tree_leaf(const DecisionTree& tree, const std::uint16_t* codes) {
  size_t node = 0;
  while (tree.nodes[node].feature >= 0) {
    const auto& nd = tree.nodes[node];
    std::uint16_t v = codes[static_cast<size_t>(nd.feature)];
    bool go_left = nd.numeric ? (v <= nd.code) : (v != nd.code);
    node = static_cast<size_t>(go_left ? nd.left : nd.right);
  }
  return node;
}

int predict_class(const RandomForestModel& m, const std::uint16_t* codes) {
  std::vector<std::int64_t> votes(static_cast<size_t>(m.n_classes), 0);
  for (const auto& tree : m.trees) {
    const auto& counts = tree.nodes[tree_leaf(tree, codes)].counts;
    int cls = 0;
    for (size_t c = 1; c < counts.size(); ++c)
      if (counts[c] > counts[static_cast<size_t>(cls)]) cls = static_cast<int>(c);
    ++votes[static_cast<size_t>(cls)];
  }
  int best = 0;
  for (int c = 1; c < m.n_classes; ++c)
    if (votes[static_cast<size_t>(c)] > votes[static_cast<size_t>(best)]) best = c;
  return best;
}

std::vector<double> predict_scores(const RandomForestModel& m,
                                   const std::uint16_t* codes) {
  std::vector<double> scores(static_cast<size_t>(m.n_classes), 0);
  for (const auto& tree : m.trees) {
    const auto& counts = tree.nodes[tree_leaf(tree, codes)].counts;
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) continue;
    for (size_t c = 0; c < counts.size(); ++c)
      scores[c] += static_cast<double>(counts[c]) / static_cast<double>(total);
  }
  if (!m.trees.empty())
    for (auto& s : scores) s /= static_cast<double>(m.trees.size());
  return scores;
}

double predict_regression(const RandomForestModel& m, const std::uint16_t* codes) {
  double sum = 0;
  for (const auto& tree : m.trees) sum += tree.nodes[tree_leaf(tree, codes)].value;
  return m.trees.empty() ? 0 : sum / static_cast<double>(m.trees.size());
}

std::vector<std::uint16_t> encode_for_model(const RandomForestModel& m,
                                            const CoreFeatures& s) {
  return encode_row(m.schema, s);
}

int predict_class(const RandomForestModel& m, const CoreFeatures& s) {
  auto codes = encode_for_model(m, s);
  return predict_class(m, codes.data());
}

MicroCpm estimate_price(const RandomForestModel& m, const CoreFeatures& s) {
  if (m.binning.representatives.empty())
    throw_data("SchemaMismatch", "model has no class representatives");
  int cls = predict_class(m, s);
  if (cls < 0 || static_cast<size_t>(cls) >= m.binning.representatives.size())
    throw_data("SchemaMismatch", "predicted class outside binning");
  return m.binning.representatives[static_cast<size_t>(cls)];
}

}  // namespace adcost
