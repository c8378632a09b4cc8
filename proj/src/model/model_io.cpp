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

#include "model/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common/error.hpp"

namespace adcost {
namespace {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

ojson schema_to_json(const FeatureSchema& schema) {
  ojson arr = ojson::array();
  for (const auto& f : schema.features) {
    ojson jf;
    jf["name"] = f.name;
    jf["group"] = std::string(1, f.group);
    jf["numeric"] = f.numeric;
    if (f.numeric)
      jf["numeric_max"] = f.numeric_max;
    else
      jf["levels"] = f.levels;
    arr.push_back(std::move(jf));
  }
  return arr;
}

ojson tree_to_json(const DecisionTree& tree) {
  ojson nodes = ojson::array();
  for (const auto& n : tree.nodes) {
    if (n.feature < 0) {
      ojson leaf;
      if (!n.counts.empty())
        leaf["c"] = n.counts;
      else
        leaf["v"] = n.value;
      nodes.push_back(std::move(leaf));
    } else {
      // internal node: [feature, code, numeric, left, right]
      nodes.push_back(ojson::array({n.feature, n.code, n.numeric ? 1 : 0,
                                    n.left, n.right}));
    }
  }
  return ojson{{"nodes", std::move(nodes)}};
}

[[noreturn]] void corrupt(const std::string& why) {
  throw_data("CorruptModel", "model file rejected: " + why);
}

FeatureSchema schema_from_json(const json& arr) {
  if (!arr.is_array() || arr.empty()) corrupt("feature_schema must be a non-empty array");
  FeatureSchema schema;
  for (const auto& jf : arr) {
    SchemaFeature f;
    if (!jf.is_object() || !jf.contains("name") || !jf["name"].is_string())
      corrupt("feature entry missing name");
    f.name = jf["name"].get<std::string>();
    std::string g = jf.value("group", std::string("B"));
    if (g.size() != 1 || g[0] < 'A' || g[0] > 'H') corrupt("bad group for " + f.name);
    f.group = g[0];
    f.numeric = jf.value("numeric", false);
    if (f.numeric) {
      f.numeric_max = jf.value("numeric_max", 0);
      if (f.numeric_max < 0 || f.numeric_max > 65535) corrupt("bad numeric_max");
    } else {
      if (!jf.contains("levels") || !jf["levels"].is_array() || jf["levels"].empty())
        corrupt("categorical feature needs levels: " + f.name);
      for (const auto& l : jf["levels"]) {
        if (!l.is_string()) corrupt("levels must be strings");
        f.levels.push_back(l.get<std::string>());
      }
      if (!std::is_sorted(f.levels.begin(), f.levels.end()))
        corrupt("levels must be sorted: " + f.name);
    }
    schema.features.push_back(std::move(f));
  }
  return schema;
}

DecisionTree tree_from_json(const json& jt, size_t n_features, int n_classes,
                            bool regression) {
  DecisionTree tree;
  if (!jt.is_object() || !jt.contains("nodes") || !jt["nodes"].is_array() ||
      jt["nodes"].empty())
    corrupt("tree needs a non-empty nodes array");
  const auto& nodes = jt["nodes"];
  for (const auto& jn : nodes) {
    TreeNode n;
    if (jn.is_array()) {
      if (jn.size() != 5) corrupt("internal node needs 5 fields");
      long long feature = jn[0].get<long long>();
      long long code = jn[1].get<long long>();
      long long numeric = jn[2].get<long long>();
      long long left = jn[3].get<long long>();
      long long right = jn[4].get<long long>();
      if (feature < 0 || feature >= static_cast<long long>(n_features))
        corrupt("node feature out of schema");
      if (code < 0 || code > 65535) corrupt("node code out of range");
      if (left < 0 || right < 0 ||
          left >= static_cast<long long>(nodes.size()) ||
          right >= static_cast<long long>(nodes.size()))
        corrupt("node child out of range");
      n.feature = static_cast<std::int16_t>(feature);
      n.code = static_cast<std::uint16_t>(code);
      n.numeric = numeric != 0;
      n.left = static_cast<std::int32_t>(left);
      n.right = static_cast<std::int32_t>(right);
    } else if (jn.is_object()) {
      if (regression) {
        if (!jn.contains("v") || !jn["v"].is_number()) corrupt("regression leaf needs v");
        n.value = jn["v"].get<double>();
      } else {
        if (!jn.contains("c") || !jn["c"].is_array()) corrupt("leaf needs counts");
        for (const auto& c : jn["c"]) {
          if (!c.is_number_integer() && !c.is_number_unsigned())
            corrupt("leaf counts must be integers");
          n.counts.push_back(c.get<std::int64_t>());
        }
        if (static_cast<int>(n.counts.size()) != n_classes)
          corrupt("leaf counts must match class count");
      }
    } else {
      corrupt("node must be array or object");
    }
    tree.nodes.push_back(std::move(n));
  }
  return tree;
}

}  // namespace

std::string export_model(const RandomForestModel& m) {
  ojson doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["feature_schema"] = schema_to_json(m.schema);

  ojson binning;
  binning["k"] = m.binning.k;
  binning["boundaries"] = m.binning.boundaries;
  ojson reps = ojson::array();
  for (MicroCpm r : m.binning.representatives) reps.push_back(format_cpm(r));
  binning["representatives"] = std::move(reps);
  binning["degenerate"] = m.binning.degenerate;
  doc["binning"] = std::move(binning);

  ojson trees = ojson::array();
  for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
  doc["trees"] = std::move(trees);

  doc["seed"] = m.seed;
  doc["n_classes"] = m.n_classes;

  ojson hp;
  hp["n_trees"] = m.hp.n_trees;
  hp["max_depth"] = m.hp.max_depth;
  hp["min_leaf"] = m.hp.min_leaf;
  hp["features_per_split"] = m.hp.features_per_split;
  hp["regression"] = m.hp.regression;
  doc["hyperparams"] = std::move(hp);

  ojson meta;
  meta["n_rows"] = m.meta.n_rows;
  meta["oob_error"] = m.meta.oob_error;
  meta["price_unit"] = "cpm";
  if (!m.meta.notes.empty()) meta["notes"] = m.meta.notes;
  doc["training_meta"] = std::move(meta);

  return doc.dump(2) + "\n";
}

RandomForestModel import_model(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) corrupt("not a JSON object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    corrupt("missing schema_version");
  if (doc["schema_version"].get<int>() != kModelSchemaVersion)
    throw_config("VersionMismatch", "unsupported model schema_version");

  RandomForestModel m;
  if (!doc.contains("feature_schema")) corrupt("missing feature_schema");
  m.schema = schema_from_json(doc["feature_schema"]);

  if (!doc.contains("binning") || !doc["binning"].is_object()) corrupt("missing binning");
  const auto& jb = doc["binning"];
  m.binning.k = jb.value("k", 0);
  if (m.binning.k < 1) corrupt("binning k must be >= 1");
  if (!jb.contains("boundaries") || !jb["boundaries"].is_array())
    corrupt("binning needs boundaries");
  for (const auto& b : jb["boundaries"]) {
    if (!b.is_number()) corrupt("boundaries must be numbers");
    m.binning.boundaries.push_back(b.get<double>());
  }
  if (static_cast<int>(m.binning.boundaries.size()) != m.binning.k - 1)
    corrupt("boundaries must number k-1");
  for (size_t i = 1; i < m.binning.boundaries.size(); ++i)
    if (m.binning.boundaries[i] <= m.binning.boundaries[i - 1])
      corrupt("boundaries must strictly increase");
  if (!jb.contains("representatives") || !jb["representatives"].is_array())
    corrupt("binning needs representatives");
  for (const auto& r : jb["representatives"]) {
    if (!r.is_string()) corrupt("representatives must be decimal strings");
    auto micro = parse_cpm(r.get<std::string>());
    if (!micro || *micro <= 0) corrupt("bad representative price");
    m.binning.representatives.push_back(*micro);
  }
  if (static_cast<int>(m.binning.representatives.size()) != m.binning.k)
    corrupt("representatives must number k");
  m.binning.degenerate = jb.value("degenerate", false);

  if (doc.contains("hyperparams") && doc["hyperparams"].is_object()) {
    const auto& jh = doc["hyperparams"];
    m.hp.n_trees = jh.value("n_trees", 0);
    m.hp.max_depth = jh.value("max_depth", 0);
    m.hp.min_leaf = jh.value("min_leaf", 1);
    m.hp.features_per_split = jh.value("features_per_split", 0);
    m.hp.regression = jh.value("regression", false);
  }

  m.seed = doc.value("seed", std::uint64_t{0});
  if (!doc.contains("n_classes") || !doc["n_classes"].is_number_integer())
    corrupt("missing n_classes");
  m.n_classes = doc["n_classes"].get<int>();
  if (!m.hp.regression && m.n_classes != m.binning.k)
    corrupt("n_classes must match binning k");

  if (!doc.contains("trees") || !doc["trees"].is_array() || doc["trees"].empty())
    corrupt("missing trees");
  for (const auto& jt : doc["trees"])
    m.trees.push_back(tree_from_json(jt, m.schema.features.size(), m.n_classes,
                                     m.hp.regression));

  if (doc.contains("training_meta") && doc["training_meta"].is_object()) {
    const auto& jm = doc["training_meta"];
    m.meta.n_rows = jm.value("n_rows", std::int64_t{0});
    m.meta.oob_error = jm.value("oob_error", 0.0);
    m.meta.notes = jm.value("notes", std::string());
  }
  return m;
}

void save_model(const RandomForestModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_config("FileNotFound", "cannot write model: " + path);
  out << export_model(m);
  if (!out) throw_data("WriteFailed", "short write: " + path);
}

RandomForestModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_config("FileNotFound", "cannot open model: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return import_model(ss.str());
}

}  // namespace adcost
