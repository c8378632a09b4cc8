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

#include <optional>

#include <nlohmann/json.hpp>

#include "features/features.hpp"

namespace adcost {

// Wire shape: {"interaction": "...", ..., "adx_id": "...", "hour_of_day": 0}
// with exactly the ten model-feature keys.
nlohmann::ordered_json features_to_json(const CoreFeatures& s);

// strict: any missing key, extra key, or wrong value type yields nullopt.
std::optional<CoreFeatures> features_from_json(const nlohmann::json& j, bool strict);

}  // namespace adcost
