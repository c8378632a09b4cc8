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

#include <string>
#include <string_view>

#include "model/forest.hpp"

namespace adcost {

inline constexpr int kModelSchemaVersion = 1;

// Single JSON document: {schema_version, feature_schema, binning
// {boundaries, representatives}, trees, seed, n_classes, hyperparams,
// training_meta}. Representatives are exact decimal CPM strings; exporting
// the same model twice yields identical bytes.
std::string export_model(const RandomForestModel& m);

// Throws Error(Config, "VersionMismatch") on a different schema_version
// and Error(Data, "CorruptModel") on anything else that fails to decode.
RandomForestModel import_model(std::string_view json_text);

void save_model(const RandomForestModel& m, const std::string& path);
RandomForestModel load_model(const std::string& path);

}  // namespace adcost
