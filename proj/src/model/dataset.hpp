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
#include <string>
#include <vector>

#include "features/features.hpp"

namespace adcost {

// One model input. Categorical features carry their closed level list
// ("other" always included); numeric features carry an inclusive code
// ceiling. `group` is the semantic family used by feature selection:
// A time, B http, C ad, D dsp, E publisher interests, F user http stats,
// G user interests, H user locations.
struct SchemaFeature {
  std::string name;
  char group = 'B';
  bool numeric = false;
  std::vector<std::string> levels;
  int numeric_max = 0;
};

struct FeatureSchema {
  std::vector<SchemaFeature> features;

  // Total one-hot dimensions: one per categorical level, one per numeric.
  int encoded_dims() const;
  std::uint16_t encode_value(size_t feature_idx, const std::string& value) const;
};

// Row-major code matrix: one code per (row, feature). Categorical codes
// index the schema's level list; numeric codes are the raw value.
struct Dataset {
  FeatureSchema schema;
  std::vector<std::uint16_t> codes;
  std::vector<int> labels;
  std::vector<double> targets;  // regression mode only

  size_t rows() const { return schema.features.empty() ? 0 : codes.size() / schema.features.size(); }
  size_t n_features() const { return schema.features.size(); }
  const std::uint16_t* row(size_t r) const { return codes.data() + r * n_features(); }
  int n_classes() const;

  Dataset subset(const std::vector<std::int32_t>& indices) const;
  Dataset keep_features(const std::vector<size_t>& feature_indices) const;
};

// Fixed feature order: interaction, device_type, os, city, tod_bucket,
// day_of_week, ad_size, publisher_iab, adx_id, hour_of_day. Level lists
// come from the observed rows.
FeatureSchema build_schema(const std::vector<CoreFeatures>& rows);

std::vector<std::uint16_t> encode_row(const FeatureSchema& schema,
                                      const CoreFeatures& s);

Dataset build_dataset(const std::vector<CoreFeatures>& rows,
                      const std::vector<int>& labels);

// Retained column indices: constant columns go, and so does any column
// whose coefficient of variation strictly exceeds the nearest-rank 99th
// percentile of all non-constant columns' coefficients.
std::vector<size_t> variance_filter(const std::vector<std::vector<double>>& columns);

// variance_filter applied to a dataset's code columns.
Dataset apply_variance_filter(const Dataset& data);

}  // namespace adcost
