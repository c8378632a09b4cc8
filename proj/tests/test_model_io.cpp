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

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "common/error.hpp"
#include "model/binning.hpp"
#include "model/model_io.hpp"

#include <nlohmann/json.hpp>

using namespace adcost;

namespace {

CoreFeatures make_row(std::string adx, std::string city, int hour) {
  CoreFeatures s;
  s.interaction = "mobile_web";
  s.device_type = "smartphone";
  s.os = "android";
  s.city = std::move(city);
  s.tod_bucket = hour < 9 ? "12am-9am" : (hour < 18 ? "9am-6pm" : "6pm-12am");
  s.day_of_week = "fri";
  s.ad_size = "300x250";
  s.publisher_iab = "IAB12";
  s.adx_id = std::move(adx);
  s.hour_of_day = hour;
  return s;
}

RandomForestModel trained_model() {
  const char* adxs[] = {"a0", "a1", "a2", "a3"};
  const char* cities[] = {"madrid", "paris", "rome", "berlin"};
  std::vector<CoreFeatures> rows;
  std::vector<int> labels;
  std::vector<MicroCpm> prices;
  const MicroCpm charges[] = {160'000, 800'000, 3'600'000, 16'000'000};
  std::mt19937_64 rng(13);
  for (int cls = 0; cls < 4; ++cls) {
    for (int i = 0; i < 40; ++i) {
      rows.push_back(make_row(adxs[cls], cities[rng() % 4],
                              static_cast<int>(rng() % 24)));
      labels.push_back(cls);
      prices.push_back(charges[cls]);
    }
  }
  auto d = build_dataset(rows, labels);
  ForestHyperParams hp;
  hp.n_trees = 15;
  auto m = fit_forest(d, hp, 77);
  m.binning = fit_binning(prices, 4);
  return m;
}

std::vector<CoreFeatures> random_inputs(size_t n, std::uint64_t seed) {
  const char* adxs[] = {"a0", "a1", "a2", "a3", "zz"};
  const char* cities[] = {"madrid", "paris", "rome", "berlin", "atlantis"};
  std::vector<CoreFeatures> out;
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < n; ++i)
    out.push_back(make_row(adxs[rng() % 5], cities[rng() % 5],
                           static_cast<int>(rng() % 24)));
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("model_io");

TEST_CASE("export and import round-trip predictions on a thousand inputs") {
  auto m = trained_model();
  auto text = export_model(m);
  auto back = import_model(text);

  CHECK(back.n_classes == m.n_classes);
  CHECK(back.seed == m.seed);
  CHECK(back.trees.size() == m.trees.size());
  CHECK(back.hp.n_trees == m.hp.n_trees);
  CHECK(back.hp.min_leaf == m.hp.min_leaf);
  CHECK(back.hp.regression == m.hp.regression);
  CHECK(back.meta.n_rows == m.meta.n_rows);
  CHECK(back.meta.oob_error == m.meta.oob_error);
  CHECK(back.binning.k == m.binning.k);
  CHECK(back.binning.boundaries == m.binning.boundaries);
  CHECK(back.binning.representatives == m.binning.representatives);

  auto inputs = random_inputs(1'000, 3);
  for (const auto& s : inputs) {
    CHECK(predict_class(back, s) == predict_class(m, s));
    CHECK(estimate_price(back, s) == estimate_price(m, s));
    auto codes_a = encode_for_model(m, s);
    auto codes_b = encode_for_model(back, s);
    CHECK(codes_a == codes_b);
    CHECK(predict_scores(back, codes_b.data()) ==
          predict_scores(m, codes_a.data()));
  }
}

TEST_CASE("export is byte-stable") {
  auto m = trained_model();
  CHECK(export_model(m) == export_model(m));

  // Round-tripping through import changes nothing either.
  auto text = export_model(m);
  CHECK(export_model(import_model(text)) == text);
}

TEST_CASE("representatives serialize as exact decimal cpm strings") {
  auto m = trained_model();
  auto doc = nlohmann::json::parse(export_model(m));
  REQUIRE(doc.contains("binning"));
  auto reps = doc["binning"]["representatives"];
  REQUIRE(reps.is_array());
  REQUIRE(reps.size() == 4);
  CHECK(reps[0].get<std::string>() == "0.16");
  CHECK(reps[1].get<std::string>() == "0.8");
  CHECK(reps[2].get<std::string>() == "3.6");
  CHECK(reps[3].get<std::string>() == "16");
  CHECK(doc["schema_version"].get<int>() == kModelSchemaVersion);
}

TEST_CASE("save and load round-trip through a file") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "adcost_test_model_io";
  fs::create_directories(dir);
  fs::path path = dir / "model.json";

  auto m = trained_model();
  save_model(m, path.string());
  auto back = load_model(path.string());
  CHECK(export_model(back) == export_model(m));

  CHECK_THROWS_WITH_AS(load_model((dir / "absent.json").string()),
                       doctest::Contains("FileNotFound"), Error);
  fs::remove_all(dir);
}

TEST_CASE("version and corruption errors are distinguished") {
  auto m = trained_model();
  auto doc = nlohmann::json::parse(export_model(m));

  auto wrong_version = doc;
  wrong_version["schema_version"] = kModelSchemaVersion + 1;
  CHECK_THROWS_WITH_AS(import_model(wrong_version.dump()),
                       doctest::Contains("VersionMismatch"), Error);

  CHECK_THROWS_WITH_AS(import_model("not json at all"),
                       doctest::Contains("CorruptModel"), Error);
  CHECK_THROWS_WITH_AS(import_model("[]"), doctest::Contains("CorruptModel"),
                       Error);
  CHECK_THROWS_WITH_AS(import_model("{}"), doctest::Contains("CorruptModel"),
                       Error);

  auto no_trees = doc;
  no_trees.erase("trees");
  CHECK_THROWS_WITH_AS(import_model(no_trees.dump()),
                       doctest::Contains("CorruptModel"), Error);

  auto bad_rep = doc;
  bad_rep["binning"]["representatives"][0] = "not a price";
  CHECK_THROWS_WITH_AS(import_model(bad_rep.dump()),
                       doctest::Contains("CorruptModel"), Error);
}

TEST_SUITE_END();
