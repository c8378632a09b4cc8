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
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cost/cost.hpp"
#include "features/features.hpp"
#include "features/geo.hpp"
#include "ingest/ingest.hpp"
#include "model/metrics.hpp"
#include "model/selection.hpp"
#include "nurl/nurl.hpp"
#include "planner/planner.hpp"

namespace adcost {

// Fully resolved run configuration. Paths are absolute (resolved against
// the config file's directory); empty string means "not configured".
struct PipelineConfig {
  std::string blacklist_path;
  std::string geo_path;
  std::string iab_map_path;
  std::string macro_rules_path;
  std::string model_path;
  int binning_k = 4;
  ForestHyperParams forest;
  ArpuFactors arpu;
  std::vector<FilterDimension> dimensions;  // empty = stock dimensions
  std::optional<std::int64_t> window_start_ms;
  std::optional<std::int64_t> window_end_ms;
  std::uint64_t seed = 1;
};

// Strict schema: unknown keys anywhere are Error(Config, "UnknownConfigKey"),
// wrong value types Error(Config, "BadConfigValue"). Referenced files must
// exist at load time ("FileNotFound").
PipelineConfig parse_config(const nlohmann::json& doc, const std::string& base_dir);
PipelineConfig load_config(const std::string& path);

// Lookup tables shared by every record walk. Absent paths load as empty
// tables; detection without macro rules finds nothing.
struct ReferenceData {
  Blacklist blacklist;
  GeoTable geo;
  IabMap iab;
  std::vector<MacroRule> rules;
};

ReferenceData load_reference_data(const PipelineConfig& cfg);

struct AnalyzeOptions {
  LogFormat format = LogFormat::json_lines;
  std::optional<std::int64_t> window_start_ms;
  std::optional<std::int64_t> window_end_ms;
};

struct AnalyzeResult {
  std::vector<UserCostReport> reports;  // sorted by user_id
  CohortSummary cohort;
  ParseCounters counters;
  std::uint64_t n_notifications = 0;
  std::uint64_t n_cleartext = 0;
  std::uint64_t n_encrypted = 0;
  std::uint64_t n_window_dropped = 0;
};

// Incremental cost analysis over a record stream. Records must arrive in
// per-user timestamp order; feed() builds notification features from the
// history seen so far and then folds the record into that history.
// Encrypted prices need `model`; without one feed() throws
// Error(Data, "ModelRequired").
class AnalyzeSession {
 public:
  AnalyzeSession(const ReferenceData* ref, const RandomForestModel* model,
                 const AnalyzeOptions& opts = {});
  ~AnalyzeSession();

  AnalyzeSession(AnalyzeSession&&) noexcept;
  AnalyzeSession& operator=(AnalyzeSession&&) noexcept;

  void feed(const HttpRequestRecord& rec);
  // Parses one log line and feeds it; malformed lines count as skipped.
  void feed_line(std::string_view line);

  // Per-user reports plus cohort rollup; the session stays usable and
  // later calls see all records fed so far.
  AnalyzeResult finish() const;

  // Snapshot of one user's ledger; nullopt for unseen users.
  std::optional<UserCostReport> user_report(const std::string& user_id) const;

  const ParseCounters& counters() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Whole-stream analysis: reads every record, orders by (timestamp, input
// sequence), then replays through an AnalyzeSession.
AnalyzeResult analyze_log(std::istream& in, const ReferenceData& ref,
                          const RandomForestModel* model,
                          const AnalyzeOptions& opts = {});
// File variant; ".gz" inputs are inflated. Throws Error(Data, "FileNotFound").
AnalyzeResult analyze_log_file(const std::string& path, const ReferenceData& ref,
                               const RandomForestModel* model,
                               const AnalyzeOptions& opts = {});

// One JSON object per user; exact CPM sums as decimal strings.
std::string user_report_line(const UserCostReport& r);
void write_user_reports(const std::vector<UserCostReport>& reports,
                        const std::string& path);

// cohort.csv (percentiles), cohort_cdf.csv, cohort_iab.csv under out_dir.
void write_cohort_files(const CohortSummary& cohort, const std::string& out_dir);

nlohmann::ordered_json analyze_summary_json(const AnalyzeResult& r);

// Labelled training samples before binning: parallel feature/price rows.
struct TrainingInputs {
  std::vector<CoreFeatures> features;
  std::vector<MicroCpm> prices;
};

// Walks a weblog like analyze does but keeps (features, price) pairs for
// cleartext notifications instead of a ledger. Encrypted notifications
// carry no trainable price and are skipped.
void collect_from_log(std::istream& in, const ReferenceData& ref,
                      TrainingInputs& out, LogFormat format = LogFormat::json_lines,
                      ParseCounters* counters = nullptr);
void collect_from_log_file(const std::string& path, const ReferenceData& ref,
                           TrainingInputs& out,
                           LogFormat format = LogFormat::json_lines,
                           ParseCounters* counters = nullptr);

// Cleartext-priced contributions from a JSONL file; features come as-is.
void collect_from_contributions(const std::string& path, TrainingInputs& out);

struct TrainOptions {
  int binning_k = 4;
  ForestHyperParams hp;
  std::uint64_t seed = 1;
  bool variance_filter = false;
  bool feature_selection = false;
};

struct TrainOutcome {
  RandomForestModel model;
  FeatureSelectionReport selection;
  bool selection_ran = false;
  size_t n_samples = 0;
};

// Price binning, one-hot dataset, optional column pruning, forest fit.
TrainOutcome train_model(const TrainingInputs& in, const TrainOptions& opts);

// Stratified cross validation over freshly binned labels.
EvalMetrics evaluate_model_cv(const TrainingInputs& in, int binning_k,
                              const ForestHyperParams& hp, int folds, int runs,
                              std::uint64_t seed);

nlohmann::ordered_json metrics_json(const EvalMetrics& m);

// Campaign plan document: setups, per-setup sample size, budget.
nlohmann::ordered_json plan_json(const std::vector<FilterDimension>& dims,
                                 PlanStrategy strategy, const SampleSizeParams& sp,
                                 double max_bid_cpm,
                                 long long impressions_per_setup);

}  // namespace adcost
