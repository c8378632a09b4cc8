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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "features/features.hpp"
#include "nurl/nurl.hpp"

namespace adcost {

// Anonymous training sample: model features plus the observed price.
// The schema is closed; any other field (user ids, URLs, IPs) makes the
// whole document invalid.
struct Contribution {
  CoreFeatures features;
  PriceValue price;
  std::int64_t submitted_at = 0;
};

// Strict validation: exactly {features, price[, submitted_at]} on top,
// exactly the ten feature keys inside. Returns nullopt on any violation.
std::optional<Contribution> parse_contribution(const nlohmann::json& j);

std::string contribution_line(const Contribution& c);

// JSONL file of contributions. Throws Error(Data, "BadContribution") with
// the offending line number, Error(Data, "FileNotFound") if unreadable.
std::vector<Contribution> load_contributions(const std::string& path);

}  // namespace adcost
