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

#include "model/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <set>

#include "common/error.hpp"

namespace adcost {
namespace {

constexpr size_t kMaxLevels = 4096;

const std::string& core_value(const CoreFeatures& s, size_t idx) {
  switch (idx) {
    case 0: return s.interaction;
    case 1: return s.device_type;
    case 2: return s.os;
    case 3: return s.city;
    case 4: return s.tod_bucket;
    case 5: return s.day_of_week;
    case 6: return s.ad_size;
    case 7: return s.publisher_iab;
    case 8: return s.adx_id;
    default: break;
  }
  static const std::string kEmpty;
  return kEmpty;
}

}  // namespace

int FeatureSchema::encoded_dims() const {
  int dims = 0;
  for (const auto& f : features)
    dims += f.numeric ? 1 : static_cast<int>(f.levels.size());
  return dims;
}

std::uint16_t FeatureSchema::encode_value(size_t feature_idx,
                                          const std::string& value) const {
  const auto& f = features[feature_idx];
  auto it = std::lower_bound(f.levels.begin(), f.levels.end(), value);
  if (it != f.levels.end() && *it == value)
    return static_cast<std::uint16_t>(it - f.levels.begin());
  auto other = std::lower_bound(f.levels.begin(), f.levels.end(), "other");
  return static_cast<std::uint16_t>(other - f.levels.begin());
}

int Dataset::n_classes() const {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  return k;
}

Dataset Dataset::subset(const std::vector<std::int32_t>& indices) const {
  Dataset out;
  out.schema = schema;
  size_t nf = n_features();
  out.codes.reserve(indices.size() * nf);
  out.labels.reserve(indices.size());
  for (auto i : indices) {
    const std::uint16_t* r = row(static_cast<size_t>(i));
    out.codes.insert(out.codes.end(), r, r + nf);
    if (!labels.empty()) out.labels.push_back(labels[static_cast<size_t>(i)]);
    if (!targets.empty()) out.targets.push_back(targets[static_cast<size_t>(i)]);
  }
  return out;
}

Dataset Dataset::keep_features(const std::vector<size_t>& feature_indices) const {
  Dataset out;
  for (size_t fi : feature_indices) out.schema.features.push_back(schema.features[fi]);
  size_t n = rows();
  out.codes.reserve(n * feature_indices.size());
  for (size_t r = 0; r < n; ++r) {
    const std::uint16_t* src = row(r);
    for (size_t fi : feature_indices) out.codes.push_back(src[fi]);
  }
  out.labels = labels;
  out.targets = targets;
  return out;
}

FeatureSchema build_schema(const std::vector<CoreFeatures>& rows) {
  struct Def {
    const char* name;
    char group;
  };
  static constexpr Def kDefs[] = {
      {"interaction", 'B'},  {"device_type", 'B'}, {"os", 'B'},
      {"city", 'H'},         {"tod_bucket", 'A'},  {"day_of_week", 'A'},
      {"ad_size", 'C'},      {"publisher_iab", 'E'}, {"adx_id", 'C'},
  };

  FeatureSchema schema;
  for (size_t i = 0; i < std::size(kDefs); ++i) {
    SchemaFeature f;
    f.name = kDefs[i].name;
    f.group = kDefs[i].group;
    std::set<std::string> levels{"other"};
    for (const auto& r : rows) levels.insert(core_value(r, i));
    if (levels.size() > kMaxLevels)
      throw_data("TooManyLevels", std::string("categorical domain too large: ") + f.name);
    f.levels.assign(levels.begin(), levels.end());
    schema.features.push_back(std::move(f));
  }

  SchemaFeature hour;
  hour.name = "hour_of_day";
  hour.group = 'A';
  hour.numeric = true;
  hour.numeric_max = 23;
  schema.features.push_back(std::move(hour));
  return schema;
}

std::vector<std::uint16_t> encode_row(const FeatureSchema& schema,
                                      const CoreFeatures& s) {
  std::vector<std::uint16_t> codes(schema.features.size());
  for (size_t i = 0; i < schema.features.size(); ++i) {
    const auto& f = schema.features[i];
    if (f.numeric) {
      int v = s.hour_of_day;
      v = std::clamp(v, 0, f.numeric_max);
      codes[i] = static_cast<std::uint16_t>(v);
    } else {
      codes[i] = schema.encode_value(i, core_value(s, i));
    }
  }
  return codes;
}

Dataset build_dataset(const std::vector<CoreFeatures>& rows,
                      const std::vector<int>& labels) {
  if (rows.size() != labels.size())
    throw_usage("RowLabelMismatch", "rows and labels must align");
  Dataset d;
  d.schema = build_schema(rows);
  d.codes.reserve(rows.size() * d.schema.features.size());
  for (const auto& r : rows) {
    auto codes = encode_row(d.schema, r);
    d.codes.insert(d.codes.end(), codes.begin(), codes.end());
  }
  d.labels = labels;
  return d;
}

std::vector<size_t> variance_filter(const std::vector<std::vector<double>>& columns) {
  std::vector<double> cv(columns.size(), 0);
  std::vector<bool> constant(columns.size(), false);
  std::vector<double> nonconstant_cvs;
  for (size_t i = 0; i < columns.size(); ++i) {
    const auto& col = columns[i];
    if (col.empty()) {
      constant[i] = true;
      continue;
    }
    double mean = 0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(col.size());
    double var = 0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= static_cast<double>(col.size());
    double sd = std::sqrt(var);
    if (sd == 0) {
      constant[i] = true;
      continue;
    }
    cv[i] = std::abs(mean) < 1e-12 ? std::numeric_limits<double>::infinity()
                                   : sd / std::abs(mean);
    nonconstant_cvs.push_back(cv[i]);
  }

  std::vector<size_t> retained;
  if (nonconstant_cvs.empty()) return retained;
  std::sort(nonconstant_cvs.begin(), nonconstant_cvs.end());
  size_t rank = static_cast<size_t>(
      std::ceil(0.99 * static_cast<double>(nonconstant_cvs.size())));
  double cutoff = nonconstant_cvs[rank - 1];

  for (size_t i = 0; i < columns.size(); ++i) {
    if (constant[i]) continue;
    if (cv[i] > cutoff) continue;
    retained.push_back(i);
  }
  return retained;
}

Dataset apply_variance_filter(const Dataset& data) {
  std::vector<std::vector<double>> columns(data.n_features());
  size_t n = data.rows();
  for (size_t f = 0; f < data.n_features(); ++f) {
    columns[f].reserve(n);
    for (size_t r = 0; r < n; ++r) columns[f].push_back(data.row(r)[f]);
  }
  auto keep = variance_filter(columns);
  if (keep.size() == data.n_features()) return data;
  return data.keep_features(keep);
}

}  // namespace adcost
