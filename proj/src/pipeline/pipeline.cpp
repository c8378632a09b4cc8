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

#include "pipeline/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <utility>

#include "common/error.hpp"
#include "common/lines.hpp"
#include "common/money.hpp"
#include "common/timeutil.hpp"
#include "model/binning.hpp"
#include "model/dataset.hpp"
#include "service/contribution.hpp"

namespace adcost {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& scope,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw_config("UnknownConfigKey", scope + "." + it.key());
  }
}

const json& object_field(const json& obj, const std::string& scope,
                         const char* key) {
  const json& v = obj.at(key);
  if (!v.is_object())
    throw_config("BadConfigValue", scope + "." + key + " must be an object");
  return v;
}

std::string string_field(const json& obj, const std::string& scope,
                         const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string())
    throw_config("BadConfigValue", scope + "." + key + " must be a string");
  return v.get<std::string>();
}

std::int64_t int_field(const json& obj, const std::string& scope, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw_config("BadConfigValue", scope + "." + key + " must be an integer");
  return v.get<std::int64_t>();
}

double number_field(const json& obj, const std::string& scope, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number())
    throw_config("BadConfigValue", scope + "." + key + " must be a number");
  return v.get<double>();
}

bool bool_field(const json& obj, const std::string& scope, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_boolean())
    throw_config("BadConfigValue", scope + "." + key + " must be a boolean");
  return v.get<bool>();
}

// Epoch milliseconds, given either as an integer or an RFC 3339 string.
std::int64_t window_edge(const json& v, const std::string& where) {
  if (v.is_number_integer() || v.is_number_unsigned())
    return v.get<std::int64_t>();
  if (v.is_string()) {
    auto ts = parse_rfc3339(v.get<std::string>());
    if (ts)
      return *ts;
  }
  throw_config("BadConfigValue",
               where + " must be epoch milliseconds or an RFC 3339 timestamp");
}

std::string resolve_path(const std::string& raw, const fs::path& base) {
  fs::path p(raw);
  if (p.is_relative())
    p = base / p;
  return p.lexically_normal().string();
}

std::string existing_path(const json& paths, const std::string& scope,
                          const char* key, const fs::path& base) {
  std::string resolved = resolve_path(string_field(paths, scope, key), base);
  if (!fs::exists(resolved))
    throw_config("FileNotFound", scope + "." + key + ": " + resolved);
  return resolved;
}

// Six decimals, trailing zeros trimmed; enough to round-trip micro CPM.
std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  size_t last = s.find_last_not_of('0');
  if (last != std::string::npos && s[last] == '.')
    --last;
  s.erase(last + 1);
  if (s == "-0")
    s = "0";
  return s;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw_data("WriteFailed", "cannot open " + path);
  return out;
}

constexpr std::int64_t kWindowOpenStart = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kWindowOpenEnd = std::numeric_limits<std::int64_t>::max();

// Header-stateful line decoder shared by the analyze and train walkers.
class LineDecoder {
 public:
  explicit LineDecoder(LogFormat format) : format_(format) {}

  std::optional<HttpRequestRecord> decode(std::string_view line,
                                          ParseCounters& counters) {
    if (format_ == LogFormat::csv) {
      if (!header_) {
        header_ = parse_csv_header(line);
        return std::nullopt;
      }
      return parse_csv_record(line, *header_, counters);
    }
    return parse_record(line, LogFormat::json_lines, counters);
  }

 private:
  LogFormat format_;
  std::optional<CsvHeader> header_;
};

}  // namespace

PipelineConfig parse_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object())
    throw_config("BadConfig", "configuration root must be a JSON object");
  reject_unknown_keys(doc, "config",
                      {"paths", "binning", "forest", "arpu", "dimensions",
                       "window", "seed"});

  PipelineConfig cfg;
  fs::path base(base_dir);

  if (doc.contains("paths")) {
    const json& paths = object_field(doc, "config", "paths");
    reject_unknown_keys(paths, "paths",
                        {"blacklist", "geo", "iab_map", "macro_rules", "model"});
    if (paths.contains("blacklist"))
      cfg.blacklist_path = existing_path(paths, "paths", "blacklist", base);
    if (paths.contains("geo"))
      cfg.geo_path = existing_path(paths, "paths", "geo", base);
    if (paths.contains("iab_map"))
      cfg.iab_map_path = existing_path(paths, "paths", "iab_map", base);
    if (paths.contains("macro_rules"))
      cfg.macro_rules_path = existing_path(paths, "paths", "macro_rules", base);
    if (paths.contains("model"))
      cfg.model_path = existing_path(paths, "paths", "model", base);
  }

  if (doc.contains("binning")) {
    const json& binning = object_field(doc, "config", "binning");
    reject_unknown_keys(binning, "binning", {"k"});
    if (binning.contains("k")) {
      std::int64_t k = int_field(binning, "binning", "k");
      if (k < 1 || k > 64)
        throw_config("BadConfigValue", "binning.k must be in [1, 64]");
      cfg.binning_k = static_cast<int>(k);
    }
  }

  if (doc.contains("forest")) {
    const json& forest = object_field(doc, "config", "forest");
    reject_unknown_keys(forest, "forest",
                        {"n_trees", "max_depth", "min_leaf", "features_per_split",
                         "regression"});
    auto read_int = [&](const char* key, int& dst, int lo) {
      if (!forest.contains(key))
        return;
      std::int64_t v = int_field(forest, "forest", key);
      if (v < lo || v > 100000)
        throw_config("BadConfigValue", std::string("forest.") + key +
                                           " is out of range");
      dst = static_cast<int>(v);
    };
    read_int("n_trees", cfg.forest.n_trees, 1);
    read_int("max_depth", cfg.forest.max_depth, 0);
    read_int("min_leaf", cfg.forest.min_leaf, 1);
    read_int("features_per_split", cfg.forest.features_per_split, 0);
    if (forest.contains("regression"))
      cfg.forest.regression = bool_field(forest, "forest", "regression");
  }

  if (doc.contains("arpu")) {
    const json& arpu = object_field(doc, "config", "arpu");
    reject_unknown_keys(arpu, "arpu",
                        {"online_share", "mobile_share", "http_share",
                         "rtb_net_share", "rtb_of_total_ads"});
    auto read_share = [&](const char* key, double& dst) {
      if (!arpu.contains(key))
        return;
      double v = number_field(arpu, "arpu", key);
      if (!(v > 0.0) || v > 1.0)
        throw_config("BadConfigValue",
                     std::string("arpu.") + key + " must be in (0, 1]");
      dst = v;
    };
    read_share("online_share", cfg.arpu.online_share);
    read_share("mobile_share", cfg.arpu.mobile_share);
    read_share("http_share", cfg.arpu.http_share);
    read_share("rtb_net_share", cfg.arpu.rtb_net_share);
    read_share("rtb_of_total_ads", cfg.arpu.rtb_of_total_ads);
  }

  if (doc.contains("dimensions")) {
    const json& dims = doc.at("dimensions");
    if (!dims.is_array())
      throw_config("BadConfigValue", "config.dimensions must be an array");
    for (const json& d : dims) {
      if (!d.is_object())
        throw_config("BadConfigValue", "dimensions[] entries must be objects");
      reject_unknown_keys(d, "dimensions[]", {"name", "values"});
      FilterDimension dim;
      dim.name = string_field(d, "dimensions[]", "name");
      const json& values = d.at("values");
      if (!values.is_array() || values.empty())
        throw_config("BadConfigValue",
                     "dimensions[].values must be a non-empty array");
      for (const json& v : values) {
        if (!v.is_string())
          throw_config("BadConfigValue", "dimensions[].values must be strings");
        dim.values.push_back(v.get<std::string>());
      }
      cfg.dimensions.push_back(std::move(dim));
    }
  }

  if (doc.contains("window")) {
    const json& window = object_field(doc, "config", "window");
    reject_unknown_keys(window, "window", {"start", "end"});
    if (window.contains("start"))
      cfg.window_start_ms = window_edge(window.at("start"), "window.start");
    if (window.contains("end"))
      cfg.window_end_ms = window_edge(window.at("end"), "window.end");
    if (cfg.window_start_ms && cfg.window_end_ms &&
        *cfg.window_start_ms > *cfg.window_end_ms)
      throw_config("BadConfigValue", "window.start is after window.end");
  }

  if (doc.contains("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw_config("BadConfigValue", "config.seed must be an integer");
    cfg.seed = v.get<std::uint64_t>();
  }

  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw_config("FileNotFound", "cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded())
    throw_config("BadConfig", path + " is not valid JSON");
  return parse_config(doc, fs::path(path).parent_path().string());
}

ReferenceData load_reference_data(const PipelineConfig& cfg) {
  ReferenceData ref;
  if (!cfg.blacklist_path.empty())
    ref.blacklist = Blacklist::load_csv(cfg.blacklist_path);
  if (!cfg.geo_path.empty())
    ref.geo = GeoTable::load_csv(cfg.geo_path);
  if (!cfg.iab_map_path.empty())
    ref.iab = IabMap::load_csv(cfg.iab_map_path);
  if (!cfg.macro_rules_path.empty())
    ref.rules = load_macro_rules(cfg.macro_rules_path);
  return ref;
}

namespace {

struct UserState {
  UserContext ctx;
  UserCostLedger ledger;
};

}  // namespace

struct AnalyzeSession::Impl {
  const ReferenceData* ref;
  const RandomForestModel* model;
  AnalyzeOptions opts;
  LineDecoder decoder;
  ParseCounters counters;
  std::map<std::string, UserState> users;
  std::uint64_t n_notifications = 0;
  std::uint64_t n_cleartext = 0;
  std::uint64_t n_encrypted = 0;
  std::uint64_t n_window_dropped = 0;

  Impl(const ReferenceData* r, const RandomForestModel* m, const AnalyzeOptions& o)
      : ref(r), model(m), opts(o), decoder(o.format) {}

  UserState& user(const std::string& uid) {
    auto it = users.find(uid);
    if (it == users.end()) {
      UserState st{UserContext(&ref->blacklist, &ref->geo, &ref->iab),
                   UserCostLedger{}};
      st.ledger.user_id = uid;
      st.ledger.window_start_ms = opts.window_start_ms.value_or(kWindowOpenStart);
      st.ledger.window_end_ms = opts.window_end_ms.value_or(kWindowOpenEnd);
      it = users.emplace(uid, std::move(st)).first;
    }
    return it->second;
  }

  void feed(const HttpRequestRecord& rec) {
    UserState& st = user(rec.user_id);
    if (auto n = detect(rec, ref->rules)) {
      ++n_notifications;
      CoreFeatures features = project(st.ctx.build_features(*n, rec));
      try {
        accumulate(st.ledger, *n, features, model);
        if (is_cleartext(n->price))
          ++n_cleartext;
        else
          ++n_encrypted;
      } catch (const Error& e) {
        if (e.code() != "OutsideWindow")
          throw;
        ++n_window_dropped;
      }
    }
    st.ctx.observe(rec);
  }
};

AnalyzeSession::AnalyzeSession(const ReferenceData* ref,
                               const RandomForestModel* model,
                               const AnalyzeOptions& opts)
    : impl_(std::make_unique<Impl>(ref, model, opts)) {
  if (!ref)
    throw_usage("NullReference", "analysis needs reference data");
}

AnalyzeSession::~AnalyzeSession() = default;
AnalyzeSession::AnalyzeSession(AnalyzeSession&&) noexcept = default;
AnalyzeSession& AnalyzeSession::operator=(AnalyzeSession&&) noexcept = default;

void AnalyzeSession::feed(const HttpRequestRecord& rec) { impl_->feed(rec); }

void AnalyzeSession::feed_line(std::string_view line) {
  if (auto rec = impl_->decoder.decode(line, impl_->counters))
    impl_->feed(*rec);
}

AnalyzeResult AnalyzeSession::finish() const {
  AnalyzeResult result;
  result.counters = impl_->counters;
  result.n_notifications = impl_->n_notifications;
  result.n_cleartext = impl_->n_cleartext;
  result.n_encrypted = impl_->n_encrypted;
  result.n_window_dropped = impl_->n_window_dropped;
  std::vector<const UserCostLedger*> ledgers;
  result.reports.reserve(impl_->users.size());
  ledgers.reserve(impl_->users.size());
  for (const auto& [uid, st] : impl_->users) {
    result.reports.push_back(report(st.ledger));
    ledgers.push_back(&st.ledger);
  }
  result.cohort = cohort_stats(result.reports, ledgers);
  return result;
}

std::optional<UserCostReport> AnalyzeSession::user_report(
    const std::string& user_id) const {
  auto it = impl_->users.find(user_id);
  if (it == impl_->users.end())
    return std::nullopt;
  return report(it->second.ledger);
}

const ParseCounters& AnalyzeSession::counters() const { return impl_->counters; }

namespace {

// Reads every record, then orders by timestamp with ties kept in input
// order so per-user histories replay exactly as logged.
template <typename Feed>
ParseCounters walk_sorted(std::istream& in, LogFormat format, Feed&& feed) {
  ParseCounters counters;
  LineDecoder decoder(format);
  std::vector<HttpRequestRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (auto rec = decoder.decode(line, counters))
      records.push_back(std::move(*rec));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const HttpRequestRecord& a, const HttpRequestRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  for (const HttpRequestRecord& rec : records)
    feed(rec);
  return counters;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw_data("FileNotFound", "cannot open " + path);
  return in;
}

}  // namespace

AnalyzeResult analyze_log(std::istream& in, const ReferenceData& ref,
                          const RandomForestModel* model,
                          const AnalyzeOptions& opts) {
  AnalyzeSession session(&ref, model, opts);
  ParseCounters counters =
      walk_sorted(in, opts.format, [&](const HttpRequestRecord& rec) {
        session.feed(rec);
      });
  AnalyzeResult result = session.finish();
  result.counters = counters;
  return result;
}

AnalyzeResult analyze_log_file(const std::string& path, const ReferenceData& ref,
                               const RandomForestModel* model,
                               const AnalyzeOptions& opts) {
  if (has_suffix(path, ".gz")) {
    AnalyzeSession session(&ref, model, opts);
    LineReader reader(path);
    if (!reader.ok())
      throw_data("FileNotFound", "cannot open " + path);
    LineDecoder decoder(opts.format);
    ParseCounters counters;
    std::vector<HttpRequestRecord> records;
    std::string line;
    while (reader.next(line))
      if (auto rec = decoder.decode(line, counters))
        records.push_back(std::move(*rec));
    std::stable_sort(records.begin(), records.end(),
                     [](const HttpRequestRecord& a, const HttpRequestRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
    for (const HttpRequestRecord& rec : records)
      session.feed(rec);
    AnalyzeResult result = session.finish();
    result.counters = counters;
    return result;
  }
  std::ifstream in = open_input(path);
  return analyze_log(in, ref, model, opts);
}

std::string user_report_line(const UserCostReport& r) {
  ordered_json j;
  j["user_id"] = r.user_id;
  j["cleartext_cpm"] = format_cpm(r.cleartext_micro);
  j["encrypted_cpm"] = format_cpm(r.encrypted_micro);
  j["total_cpm"] = format_cpm(r.total_micro);
  j["usd"] = r.usd_equivalent;
  j["cleartext_count"] = r.cleartext_count;
  j["encrypted_count"] = r.encrypted_count;
  j["avg_cleartext_cpm"] = r.avg_cleartext_cpm;
  j["avg_encrypted_cpm"] = r.avg_encrypted_cpm;
  if (r.window_start_ms != kWindowOpenStart || r.window_end_ms != kWindowOpenEnd) {
    j["window_start_ms"] = r.window_start_ms;
    j["window_end_ms"] = r.window_end_ms;
  }
  return j.dump();
}

void write_user_reports(const std::vector<UserCostReport>& reports,
                        const std::string& path) {
  std::ofstream out = open_output(path);
  for (const UserCostReport& r : reports)
    out << user_report_line(r) << '\n';
  if (!out)
    throw_data("WriteFailed", "short write on " + path);
}

void write_cohort_files(const CohortSummary& cohort, const std::string& out_dir) {
  fs::create_directories(out_dir);
  fs::path dir(out_dir);
  {
    std::ofstream out = open_output((dir / "cohort.csv").string());
    out << "pct,total_cpm,cleartext_cpm,encrypted_cpm\n";
    for (const PercentileRow& row : cohort.percentiles)
      out << row.pct << ',' << csv_number(row.v_cpm) << ','
          << csv_number(row.c_cpm) << ',' << csv_number(row.e_cpm) << '\n';
  }
  {
    std::ofstream out = open_output((dir / "cohort_cdf.csv").string());
    out << "value_cpm,fraction\n";
    for (const CdfPoint& p : cohort.v_cdf)
      out << csv_number(p.value_cpm) << ',' << csv_number(p.fraction) << '\n';
  }
  {
    std::ofstream out = open_output((dir / "cohort_iab.csv").string());
    out << "iab,count,mean_cpm,median_cpm,min_cpm,max_cpm\n";
    for (const IabRow& row : cohort.iab_rows)
      out << row.iab << ',' << row.count << ',' << csv_number(row.mean_cpm)
          << ',' << csv_number(row.median_cpm) << ',' << csv_number(row.min_cpm)
          << ',' << csv_number(row.max_cpm) << '\n';
  }
}

ordered_json analyze_summary_json(const AnalyzeResult& r) {
  ordered_json j;
  j["users"] = r.reports.size();
  j["records_parsed"] = r.counters.parsed;
  j["records_skipped"] = r.counters.skipped;
  j["notifications"] = r.n_notifications;
  j["cleartext"] = r.n_cleartext;
  j["encrypted"] = r.n_encrypted;
  j["window_dropped"] = r.n_window_dropped;
  return j;
}

namespace {

// Detection walk that keeps cleartext (features, price) pairs.
class TrainingCollector {
 public:
  TrainingCollector(const ReferenceData* ref, TrainingInputs* out)
      : ref_(ref), out_(out) {}

  void feed(const HttpRequestRecord& rec) {
    auto it = ctxs_.find(rec.user_id);
    if (it == ctxs_.end())
      it = ctxs_
               .emplace(rec.user_id,
                        UserContext(&ref_->blacklist, &ref_->geo, &ref_->iab))
               .first;
    if (auto n = detect(rec, ref_->rules)) {
      // Both branches build features so campaign popularity advances
      // exactly as it does during analysis; only cleartext rows train.
      CoreFeatures features = project(it->second.build_features(*n, rec));
      if (is_cleartext(n->price)) {
        out_->features.push_back(std::move(features));
        out_->prices.push_back(std::get<CleartextPrice>(n->price).cpm);
      }
    }
    it->second.observe(rec);
  }

 private:
  const ReferenceData* ref_;
  TrainingInputs* out_;
  std::map<std::string, UserContext> ctxs_;
};

}  // namespace

void collect_from_log(std::istream& in, const ReferenceData& ref,
                      TrainingInputs& out, LogFormat format,
                      ParseCounters* counters) {
  TrainingCollector collector(&ref, &out);
  ParseCounters local = walk_sorted(in, format, [&](const HttpRequestRecord& rec) {
    collector.feed(rec);
  });
  if (counters)
    *counters = local;
}

void collect_from_log_file(const std::string& path, const ReferenceData& ref,
                           TrainingInputs& out, LogFormat format,
                           ParseCounters* counters) {
  if (has_suffix(path, ".gz")) {
    LineReader reader(path);
    if (!reader.ok())
      throw_data("FileNotFound", "cannot open " + path);
    std::string text;
    std::string line;
    while (reader.next(line)) {
      text += line;
      text += '\n';
    }
    std::istringstream in(text);
    collect_from_log(in, ref, out, format, counters);
    return;
  }
  std::ifstream in = open_input(path);
  collect_from_log(in, ref, out, format, counters);
}

void collect_from_contributions(const std::string& path, TrainingInputs& out) {
  for (const Contribution& c : load_contributions(path)) {
    if (!is_cleartext(c.price))
      continue;
    out.features.push_back(c.features);
    out.prices.push_back(std::get<CleartextPrice>(c.price).cpm);
  }
}

TrainOutcome train_model(const TrainingInputs& in, const TrainOptions& opts) {
  if (in.features.size() != in.prices.size())
    throw_usage("BadTrainingInputs", "feature and price row counts differ");
  if (in.features.empty())
    throw_data("EmptyDataset", "no training samples");

  TrainOutcome outcome;
  outcome.n_samples = in.features.size();

  PriceBinning binning = fit_binning(in.prices, opts.binning_k);
  std::vector<int> labels(in.prices.size());
  for (size_t i = 0; i < in.prices.size(); ++i)
    labels[i] = binning.class_of(in.prices[i]);

  Dataset data = build_dataset(in.features, labels);
  if (opts.hp.regression)
    data.targets = log_normalize(in.prices);
  if (opts.variance_filter)
    data = apply_variance_filter(data);

  if (opts.feature_selection && !opts.hp.regression) {
    outcome.selection = select_features(data, opts.hp, opts.seed);
    outcome.selection_ran = true;
    const auto& chosen = outcome.selection.chosen;
    if (!chosen.empty() && chosen.size() < data.n_features()) {
      std::vector<size_t> keep;
      for (size_t i = 0; i < data.schema.features.size(); ++i)
        if (std::find(chosen.begin(), chosen.end(),
                      data.schema.features[i].name) != chosen.end())
          keep.push_back(i);
      data = data.keep_features(keep);
    }
  }

  outcome.model = fit_forest(data, opts.hp, opts.seed);
  outcome.model.binning = binning;
  return outcome;
}

EvalMetrics evaluate_model_cv(const TrainingInputs& in, int binning_k,
                              const ForestHyperParams& hp, int folds, int runs,
                              std::uint64_t seed) {
  if (in.features.size() != in.prices.size())
    throw_usage("BadTrainingInputs", "feature and price row counts differ");
  if (in.features.empty())
    throw_data("EmptyDataset", "no evaluation samples");
  PriceBinning binning = fit_binning(in.prices, binning_k);
  std::vector<int> labels(in.prices.size());
  for (size_t i = 0; i < in.prices.size(); ++i)
    labels[i] = binning.class_of(in.prices[i]);
  Dataset data = build_dataset(in.features, labels);
  return evaluate(data, hp, folds, runs, seed);
}

ordered_json metrics_json(const EvalMetrics& m) {
  ordered_json j;
  j["tp_rate"] = m.tp_rate;
  j["fp_rate"] = m.fp_rate;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["accuracy"] = m.accuracy();
  j["auc_roc"] = m.auc_roc;
  j["oob_error"] = m.oob_error;
  ordered_json confusion = ordered_json::array();
  for (const auto& row : m.confusion)
    confusion.push_back(row);
  j["confusion"] = std::move(confusion);
  return j;
}

ordered_json plan_json(const std::vector<FilterDimension>& dims,
                       PlanStrategy strategy, const SampleSizeParams& sp,
                       double max_bid_cpm, long long impressions_per_setup) {
  std::vector<CampaignSetup> setups = enumerate_setups(dims, strategy);

  ordered_json j;
  j["strategy"] =
      strategy == PlanStrategy::full_cross ? "full_cross" : "paper_144";
  j["setup_count"] = setups.size();

  ordered_json dims_json = ordered_json::array();
  for (const FilterDimension& d : dims) {
    ordered_json dj;
    dj["name"] = d.name;
    dj["values"] = d.values;
    dims_json.push_back(std::move(dj));
  }
  j["dimensions"] = std::move(dims_json);

  ordered_json sample;
  sample["std_cpm"] = sp.std_cpm;
  sample["alpha"] = sp.alpha;
  if (sp.std_cpm > 0)
    sample["z"] = z_score(sp.alpha);
  long long per_setup = impressions_per_setup;
  if (sp.d > 0) {
    sample["margin_cpm"] = sp.d;
    long long n = required_n(sp);
    sample["required_n"] = n;
    if (per_setup <= 0)
      per_setup = n;
  }
  if (sp.n > 0) {
    sample["n"] = sp.n;
    sample["margin_of_error_cpm"] = margin_of_error(sp);
  }
  j["sample"] = std::move(sample);

  if (per_setup > 0) {
    j["impressions_per_setup"] = per_setup;
    j["total_impressions"] =
        static_cast<long long>(setups.size()) * per_setup;
    if (max_bid_cpm > 0) {
      j["max_bid_cpm"] = max_bid_cpm;
      j["budget_usd"] = budget_usd(setups.size(), per_setup, max_bid_cpm);
    }
  }

  ordered_json setups_json = ordered_json::array();
  for (const CampaignSetup& s : setups) {
    ordered_json sj;
    for (const auto& [name, value] : s.assignment)
      sj[name] = value;
    setups_json.push_back(std::move(sj));
  }
  j["setups"] = std::move(setups_json);
  return j;
}

}  // namespace adcost
