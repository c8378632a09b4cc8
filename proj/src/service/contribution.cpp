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

#include "service/contribution.hpp"

#include "common/error.hpp"
#include "common/lines.hpp"
#include "features/feature_json.hpp"

namespace adcost {

std::optional<Contribution> parse_contribution(const nlohmann::json& j) {
  if (!j.is_object()) return std::nullopt;
  size_t allowed = 2;
  auto fit = j.find("features");
  auto pit = j.find("price");
  if (fit == j.end() || pit == j.end()) return std::nullopt;
  auto sit = j.find("submitted_at");
  if (sit != j.end()) {
    if (!sit->is_number_integer() || sit->get<std::int64_t>() < 0) return std::nullopt;
    ++allowed;
  }
  if (j.size() != allowed) return std::nullopt;

  Contribution c;
  auto feat = features_from_json(*fit, /*strict=*/true);
  if (!feat) return std::nullopt;
  c.features = *feat;

  std::string raw;
  if (pit->is_string()) {
    raw = pit->get<std::string>();
  } else if (pit->is_number()) {
    raw = pit->dump();
  } else {
    return std::nullopt;
  }
  try {
    c.price = classify_price(raw);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (sit != j.end()) c.submitted_at = sit->get<std::int64_t>();
  return c;
}

std::string contribution_line(const Contribution& c) {
  nlohmann::ordered_json j;
  j["features"] = features_to_json(c.features);
  if (const auto* clear = std::get_if<CleartextPrice>(&c.price)) {
    j["price"] = format_cpm(clear->cpm);
  } else {
    j["price"] = std::get<EncryptedPrice>(c.price).token;
  }
  j["submitted_at"] = c.submitted_at;
  return j.dump();
}

std::vector<Contribution> load_contributions(const std::string& path) {
  LineReader reader(path);
  if (!reader.ok()) throw_data("FileNotFound", "cannot open contributions: " + path);
  std::vector<Contribution> out;
  std::string line;
  size_t line_no = 0;
  while (reader.next(line)) {
    ++line_no;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    auto c = parse_contribution(j);
    if (!c) {
      throw_data("BadContribution",
                 path + ":" + std::to_string(line_no) + " is not a valid contribution");
    }
    out.push_back(std::move(*c));
  }
  return out;
}

}  // namespace adcost
