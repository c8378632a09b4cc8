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

#include "adcost.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/money.hpp"
#include "common/timeutil.hpp"
#include "features/feature_json.hpp"
#include "model/model_io.hpp"
#include "pipeline/pipeline.hpp"
#include "service/service.hpp"
#include "sim/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

using namespace adcost;

extern "C" {

struct adcost_ctx {
  PipelineConfig cfg;
  ReferenceData ref;
};

struct adcost_model {
  RandomForestModel model;
};

struct adcost_session {
  // Model resolved at open time: borrowed from the handle, or loaded from
  // the context's configured model path.
  std::unique_ptr<adcost::RandomForestModel> owned_model;
  std::unique_ptr<adcost::AnalyzeSession> session;
};

struct adcost_server {
  std::unique_ptr<ModelService> service;
  std::string store_dir;
  bool running = false;
};

}  // extern "C"

namespace {

thread_local std::string tl_error_message;
thread_local std::string tl_error_code;

adcost_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Data:
      return ADCOST_ERR_DATA;
    case ErrorKind::Config:
      return ADCOST_ERR_CONFIG;
    case ErrorKind::Usage:
      return ADCOST_ERR_USAGE;
  }
  return ADCOST_ERR_USAGE;
}

adcost_status fail(adcost_status s, std::string code, std::string message) {
  tl_error_code = std::move(code);
  tl_error_message = std::move(message);
  return s;
}

adcost_status fail_usage(const char* code, const char* message) {
  return fail(ADCOST_ERR_USAGE, code, message);
}

// Runs `f`, translating exceptions into statuses and clearing the
// thread-local error on success.
template <typename F>
adcost_status guarded(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    // what() leads with "Code: "; keep the bare message here, the code
    // travels separately through adcost_last_error_code().
    std::string message = e.what();
    std::string prefix = e.code() + ": ";
    if (message.rfind(prefix, 0) == 0)
      message.erase(0, prefix.size());
    return fail(status_of(e.kind()), e.code(), std::move(message));
  } catch (const std::exception& e) {
    return fail(ADCOST_ERR_DATA, "Internal", e.what());
  }
  tl_error_code.clear();
  tl_error_message.clear();
  return ADCOST_OK;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out)
    return nullptr;
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void emit(char** dst, const std::string& s) {
  if (dst)
    *dst = copy_string(s);
}

LogFormat parse_format(const char* format) {
  if (!format || std::string_view(format) == "jsonl" ||
      std::string_view(format) == "json")
    return LogFormat::json_lines;
  if (std::string_view(format) == "csv")
    return LogFormat::csv;
  throw_usage("BadFormat", "log format must be jsonl or csv");
}

AnalyzeOptions options_for(const adcost_ctx* ctx, const char* format) {
  AnalyzeOptions opts;
  opts.format = parse_format(format);
  opts.window_start_ms = ctx->cfg.window_start_ms;
  opts.window_end_ms = ctx->cfg.window_end_ms;
  return opts;
}

std::int64_t parse_integer(const std::string& value, const char* key) {
  size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw_config("BadConfigValue", std::string(key) + " must be an integer");
  }
  if (used != value.size())
    throw_config("BadConfigValue", std::string(key) + " must be an integer");
  return v;
}

double parse_double(const std::string& value, const char* key) {
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw_config("BadConfigValue", std::string(key) + " must be a number");
  }
  if (used != value.size())
    throw_config("BadConfigValue", std::string(key) + " must be a number");
  return v;
}

bool parse_bool(const std::string& value, const char* key) {
  if (value == "true" || value == "1")
    return true;
  if (value == "false" || value == "0")
    return false;
  throw_config("BadConfigValue", std::string(key) + " must be a boolean");
}

std::int64_t parse_window_edge(const std::string& value, const char* key) {
  bool numeric = !value.empty();
  for (size_t i = 0; i < value.size(); ++i) {
    char c = value[i];
    if (!(c >= '0' && c <= '9') && !(i == 0 && c == '-')) {
      numeric = false;
      break;
    }
  }
  if (numeric)
    return parse_integer(value, key);
  if (auto ts = parse_rfc3339(value))
    return *ts;
  throw_config("BadConfigValue", std::string(key) +
                                     " must be epoch milliseconds or RFC 3339");
}

std::string existing_file(const std::string& value, const char* key) {
  if (!fs::exists(value))
    throw_config("FileNotFound", std::string(key) + ": " + value);
  return value;
}

void apply_ctx_key(adcost_ctx* ctx, const std::string& key,
                   const std::string& value) {
  PipelineConfig& cfg = ctx->cfg;
  if (key == "paths.blacklist") {
    cfg.blacklist_path = existing_file(value, key.c_str());
    ctx->ref.blacklist = Blacklist::load_csv(cfg.blacklist_path);
  } else if (key == "paths.geo") {
    cfg.geo_path = existing_file(value, key.c_str());
    ctx->ref.geo = GeoTable::load_csv(cfg.geo_path);
  } else if (key == "paths.iab_map") {
    cfg.iab_map_path = existing_file(value, key.c_str());
    ctx->ref.iab = IabMap::load_csv(cfg.iab_map_path);
  } else if (key == "paths.macro_rules") {
    cfg.macro_rules_path = existing_file(value, key.c_str());
    ctx->ref.rules = load_macro_rules(cfg.macro_rules_path);
  } else if (key == "paths.model") {
    cfg.model_path = existing_file(value, key.c_str());
  } else if (key == "binning.k") {
    std::int64_t k = parse_integer(value, key.c_str());
    if (k < 1 || k > 64)
      throw_config("BadConfigValue", "binning.k must be in [1, 64]");
    cfg.binning_k = static_cast<int>(k);
  } else if (key == "forest.n_trees") {
    std::int64_t v = parse_integer(value, key.c_str());
    if (v < 1 || v > 100000)
      throw_config("BadConfigValue", "forest.n_trees is out of range");
    cfg.forest.n_trees = static_cast<int>(v);
  } else if (key == "forest.max_depth") {
    std::int64_t v = parse_integer(value, key.c_str());
    if (v < 0 || v > 100000)
      throw_config("BadConfigValue", "forest.max_depth is out of range");
    cfg.forest.max_depth = static_cast<int>(v);
  } else if (key == "forest.min_leaf") {
    std::int64_t v = parse_integer(value, key.c_str());
    if (v < 1 || v > 100000)
      throw_config("BadConfigValue", "forest.min_leaf is out of range");
    cfg.forest.min_leaf = static_cast<int>(v);
  } else if (key == "forest.features_per_split") {
    std::int64_t v = parse_integer(value, key.c_str());
    if (v < 0 || v > 100000)
      throw_config("BadConfigValue", "forest.features_per_split is out of range");
    cfg.forest.features_per_split = static_cast<int>(v);
  } else if (key == "forest.regression") {
    cfg.forest.regression = parse_bool(value, key.c_str());
  } else if (key == "arpu.online_share" || key == "arpu.mobile_share" ||
             key == "arpu.http_share" || key == "arpu.rtb_net_share" ||
             key == "arpu.rtb_of_total_ads") {
    double v = parse_double(value, key.c_str());
    if (!(v > 0.0) || v > 1.0)
      throw_config("BadConfigValue", key + " must be in (0, 1]");
    if (key == "arpu.online_share")
      cfg.arpu.online_share = v;
    else if (key == "arpu.mobile_share")
      cfg.arpu.mobile_share = v;
    else if (key == "arpu.http_share")
      cfg.arpu.http_share = v;
    else if (key == "arpu.rtb_net_share")
      cfg.arpu.rtb_net_share = v;
    else
      cfg.arpu.rtb_of_total_ads = v;
  } else if (key == "window.start") {
    cfg.window_start_ms = parse_window_edge(value, key.c_str());
  } else if (key == "window.end") {
    cfg.window_end_ms = parse_window_edge(value, key.c_str());
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_integer(value, key.c_str()));
  } else {
    throw_config("UnknownConfigKey", key);
  }
}

void write_analysis_outputs(const AnalyzeResult& result, const char* out_dir) {
  if (!out_dir || !*out_dir)
    return;
  fs::create_directories(out_dir);
  write_user_reports(result.reports, (fs::path(out_dir) / "user_reports.jsonl").string());
  write_cohort_files(result.cohort, out_dir);
}

TrainingInputs gather_inputs(const adcost_ctx* ctx, const char* log_path,
                             const char* contributions_path, const char* format) {
  TrainingInputs inputs;
  bool any = false;
  if (log_path && *log_path) {
    collect_from_log_file(log_path, ctx->ref, inputs, parse_format(format));
    any = true;
  }
  if (contributions_path && *contributions_path) {
    collect_from_contributions(contributions_path, inputs);
    any = true;
  }
  if (!any)
    throw_usage("MissingInput", "need a weblog or a contributions file");
  return inputs;
}

SimConfig sim_config_from_overrides(const char* overrides_json) {
  SimConfig cfg = default_sim_config();
  if (!overrides_json || !*overrides_json)
    return cfg;
  json doc = json::parse(overrides_json, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw_config("BadConfig", "simulation overrides must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    auto want_int = [&]() -> std::int64_t {
      if (!v.is_number_integer() && !v.is_number_unsigned())
        throw_config("BadConfigValue", key + " must be an integer");
      return v.get<std::int64_t>();
    };
    auto want_number = [&]() -> double {
      if (!v.is_number())
        throw_config("BadConfigValue", key + " must be a number");
      return v.get<double>();
    };
    if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(want_int());
    } else if (key == "n_users") {
      cfg.n_users = static_cast<int>(want_int());
    } else if (key == "target_impressions") {
      cfg.target_impressions = want_int();
    } else if (key == "duration_days") {
      cfg.duration_days = static_cast<int>(want_int());
    } else if (key == "base_cpm") {
      cfg.price_law.base_cpm = want_number();
    } else if (key == "noise_sigma") {
      cfg.price_law.noise_sigma = want_number();
    } else if (key == "adx_only") {
      if (!v.is_boolean())
        throw_config("BadConfigValue", "adx_only must be a boolean");
      cfg.price_law.adx_only = v.get<bool>();
    } else {
      throw_config("UnknownConfigKey", "simulate." + key);
    }
  }
  return cfg;
}

// Minimal report-line reader for cohort rollups over existing output.
std::vector<UserCostReport> read_user_reports(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw_data("FileNotFound", "cannot open " + path);
  std::vector<UserCostReport> reports;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("user_id") ||
        !j.contains("total_cpm"))
      throw_data("BadReportLine", path + ":" + std::to_string(line_no));
    UserCostReport r;
    r.user_id = j.at("user_id").get<std::string>();
    auto cpm_of = [&](const char* key) -> MicroCpm {
      if (!j.contains(key))
        return 0;
      const json& v = j.at(key);
      if (v.is_string()) {
        auto parsed = parse_cpm(v.get<std::string>());
        if (!parsed)
          throw_data("BadReportLine", path + ":" + std::to_string(line_no));
        return *parsed;
      }
      if (v.is_number())
        return cpm_from_double(v.get<double>());
      throw_data("BadReportLine", path + ":" + std::to_string(line_no));
    };
    r.cleartext_micro = cpm_of("cleartext_cpm");
    r.encrypted_micro = cpm_of("encrypted_cpm");
    r.total_micro = cpm_of("total_cpm");
    r.usd_equivalent = cpm_to_double(r.total_micro) / 1000.0;
    if (j.contains("cleartext_count"))
      r.cleartext_count = j.at("cleartext_count").get<size_t>();
    if (j.contains("encrypted_count"))
      r.encrypted_count = j.at("encrypted_count").get<size_t>();
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace

extern "C" {

const char* adcost_version(void) { return "0.1.0"; }

const char* adcost_last_error(void) { return tl_error_message.c_str(); }

const char* adcost_last_error_code(void) { return tl_error_code.c_str(); }

void adcost_string_free(char* s) { std::free(s); }

adcost_status adcost_ctx_open(const char* config_path, adcost_ctx** out) {
  if (!out)
    return fail_usage("NullArgument", "out handle is required");
  *out = nullptr;
  return guarded([&] {
    auto ctx = std::make_unique<adcost_ctx>();
    if (config_path && *config_path)
      ctx->cfg = load_config(config_path);
    ctx->ref = load_reference_data(ctx->cfg);
    *out = ctx.release();
  });
}

adcost_status adcost_ctx_set(adcost_ctx* ctx, const char* key,
                             const char* value) {
  if (!ctx || !key || !value)
    return fail_usage("NullArgument", "ctx, key and value are required");
  return guarded([&] { apply_ctx_key(ctx, key, value); });
}

void adcost_ctx_close(adcost_ctx* ctx) { delete ctx; }

adcost_status adcost_model_load(const char* path, adcost_model** out) {
  if (!path || !out)
    return fail_usage("NullArgument", "path and out handle are required");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<adcost_model>();
    handle->model = load_model(path);
    *out = handle.release();
  });
}

adcost_status adcost_model_import(const char* json_text, adcost_model** out) {
  if (!json_text || !out)
    return fail_usage("NullArgument", "json_text and out handle are required");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<adcost_model>();
    handle->model = import_model(json_text);
    *out = handle.release();
  });
}

adcost_status adcost_model_export(const adcost_model* model, char** json_out) {
  if (!model || !json_out)
    return fail_usage("NullArgument", "model and json_out are required");
  *json_out = nullptr;
  return guarded([&] { emit(json_out, export_model(model->model)); });
}

adcost_status adcost_model_estimate(const adcost_model* model,
                                    const char* features_json,
                                    int64_t* micro_cpm, int* price_class) {
  if (!model || !features_json)
    return fail_usage("NullArgument", "model and features_json are required");
  return guarded([&] {
    json doc = json::parse(features_json, nullptr, false);
    if (doc.is_discarded())
      throw_usage("BadFeatures", "features_json is not valid JSON");
    auto features = features_from_json(doc, /*strict=*/true);
    if (!features)
      throw_usage("BadFeatures", "features_json must carry exactly the ten model features");
    MicroCpm estimate = estimate_price(model->model, *features);
    if (micro_cpm)
      *micro_cpm = estimate;
    if (price_class)
      *price_class = predict_class(model->model, *features);
  });
}

void adcost_model_close(adcost_model* model) { delete model; }

adcost_status adcost_session_open(const adcost_ctx* ctx,
                                  const adcost_model* model,
                                  const char* format, adcost_session** out) {
  if (!ctx || !out)
    return fail_usage("NullArgument", "ctx and out handle are required");
  *out = nullptr;
  return guarded([&] {
    AnalyzeOptions opts = options_for(ctx, format);
    auto session = std::make_unique<adcost_session>();
    const RandomForestModel* use = model ? &model->model : nullptr;
    if (!use && !ctx->cfg.model_path.empty()) {
      session->owned_model =
          std::make_unique<RandomForestModel>(load_model(ctx->cfg.model_path));
      use = session->owned_model.get();
    }
    session->session = std::make_unique<AnalyzeSession>(&ctx->ref, use, opts);
    *out = session.release();
  });
}

adcost_status adcost_session_feed_line(adcost_session* session,
                                       const char* line) {
  if (!session || !line)
    return fail_usage("NullArgument", "session and line are required");
  return guarded([&] { session->session->feed_line(line); });
}

adcost_status adcost_session_user_total(const adcost_session* session,
                                        const char* user_id,
                                        int64_t* cleartext_micro,
                                        int64_t* encrypted_micro,
                                        int64_t* total_micro) {
  if (!session || !user_id)
    return fail_usage("NullArgument", "session and user_id are required");
  return guarded([&] {
    auto report = session->session->user_report(user_id);
    if (!report)
      throw_data("UnknownUser", user_id);
    if (cleartext_micro)
      *cleartext_micro = report->cleartext_micro;
    if (encrypted_micro)
      *encrypted_micro = report->encrypted_micro;
    if (total_micro)
      *total_micro = report->total_micro;
  });
}

adcost_status adcost_session_finish(adcost_session* session,
                                    const char* out_dir, char** summary_json) {
  if (!session)
    return fail_usage("NullArgument", "session is required");
  if (summary_json)
    *summary_json = nullptr;
  return guarded([&] {
    AnalyzeResult result = session->session->finish();
    write_analysis_outputs(result, out_dir);
    emit(summary_json, analyze_summary_json(result).dump());
  });
}

void adcost_session_close(adcost_session* session) { delete session; }

adcost_status adcost_analyze_file(const adcost_ctx* ctx,
                                  const adcost_model* model,
                                  const char* input_path, const char* format,
                                  const char* out_dir, char** summary_json) {
  if (!ctx || !input_path)
    return fail_usage("NullArgument", "ctx and input_path are required");
  if (summary_json)
    *summary_json = nullptr;
  return guarded([&] {
    AnalyzeOptions opts = options_for(ctx, format);
    const RandomForestModel* use = model ? &model->model : nullptr;
    std::optional<RandomForestModel> from_config;
    if (!use && !ctx->cfg.model_path.empty()) {
      from_config = load_model(ctx->cfg.model_path);
      use = &*from_config;
    }
    AnalyzeResult result = analyze_log_file(input_path, ctx->ref, use, opts);
    write_analysis_outputs(result, out_dir);
    emit(summary_json, analyze_summary_json(result).dump());
  });
}

adcost_status adcost_train(const adcost_ctx* ctx, const char* log_path,
                           const char* contributions_path, const char* format,
                           int variance_filter, int feature_selection,
                           const char* out_dir, char** summary_json) {
  if (!ctx)
    return fail_usage("NullArgument", "ctx is required");
  if (summary_json)
    *summary_json = nullptr;
  return guarded([&] {
    TrainingInputs inputs =
        gather_inputs(ctx, log_path, contributions_path, format);
    TrainOptions opts;
    opts.binning_k = ctx->cfg.binning_k;
    opts.hp = ctx->cfg.forest;
    opts.seed = ctx->cfg.seed;
    opts.variance_filter = variance_filter != 0;
    opts.feature_selection = feature_selection != 0;
    TrainOutcome outcome = train_model(inputs, opts);

    ordered_json summary;
    summary["samples"] = outcome.n_samples;
    summary["classes"] = outcome.model.binning.k;
    summary["boundaries_log"] = outcome.model.binning.boundaries;
    ordered_json reps = ordered_json::array();
    for (MicroCpm rep : outcome.model.binning.representatives)
      reps.push_back(format_cpm(rep));
    summary["representatives_cpm"] = std::move(reps);
    summary["oob_error"] = outcome.model.meta.oob_error;
    if (outcome.selection_ran) {
      summary["selection"] = ordered_json{
          {"chosen_groups", outcome.selection.chosen_groups},
          {"chosen", outcome.selection.chosen},
          {"chance_level", outcome.selection.chance_level}};
    }
    if (out_dir && *out_dir) {
      fs::create_directories(out_dir);
      std::string model_path = (fs::path(out_dir) / "model.json").string();
      save_model(outcome.model, model_path);
      summary["model_path"] = model_path;
      if (outcome.selection_ran) {
        ordered_json sel;
        sel["chosen_groups"] = outcome.selection.chosen_groups;
        sel["chosen"] = outcome.selection.chosen;
        sel["chance_level"] = outcome.selection.chance_level;
        sel["base_precision"] = outcome.selection.base_precision;
        sel["base_recall"] = outcome.selection.base_recall;
        sel["delta_precision"] = outcome.selection.delta_precision;
        sel["delta_recall"] = outcome.selection.delta_recall;
        ordered_json candidates = ordered_json::array();
        for (const SubsetEval& c : outcome.selection.candidates) {
          candidates.push_back(ordered_json{{"groups", c.groups},
                                            {"features", c.features},
                                            {"precision", c.precision},
                                            {"recall", c.recall}});
        }
        sel["candidates"] = std::move(candidates);
        std::ofstream sel_out(fs::path(out_dir) / "selection.json",
                              std::ios::binary);
        sel_out << sel.dump(2) << '\n';
      }
    }
    emit(summary_json, summary.dump());
  });
}

adcost_status adcost_evaluate(const adcost_ctx* ctx, const char* log_path,
                              const char* contributions_path,
                              const char* format, int folds, int runs,
                              char** metrics_json_out) {
  if (!ctx)
    return fail_usage("NullArgument", "ctx is required");
  if (metrics_json_out)
    *metrics_json_out = nullptr;
  return guarded([&] {
    TrainingInputs inputs =
        gather_inputs(ctx, log_path, contributions_path, format);
    if (folds < 1)
      folds = 10;
    if (runs < 1)
      runs = 10;
    EvalMetrics metrics = evaluate_model_cv(inputs, ctx->cfg.binning_k,
                                            ctx->cfg.forest, folds, runs,
                                            ctx->cfg.seed);
    emit(metrics_json_out, metrics_json(metrics).dump());
  });
}

adcost_status adcost_plan(const adcost_ctx* ctx, const char* strategy,
                          double std_cpm, double alpha, double margin_cpm,
                          int n_per_setup, double max_bid_cpm,
                          long long impressions_per_setup, char** plan_json_out) {
  if (!ctx || !strategy)
    return fail_usage("NullArgument", "ctx and strategy are required");
  if (plan_json_out)
    *plan_json_out = nullptr;
  return guarded([&] {
    PlanStrategy ps;
    std::string_view s(strategy);
    if (s == "full_cross")
      ps = PlanStrategy::full_cross;
    else if (s == "paper_144")
      ps = PlanStrategy::paper_144;
    else
      throw_usage("BadStrategy", "strategy must be full_cross or paper_144");
    SampleSizeParams sp;
    sp.std_cpm = std_cpm;
    sp.alpha = alpha > 0 ? alpha : 0.05;
    sp.d = margin_cpm;
    sp.n = n_per_setup;
    std::vector<FilterDimension> dims =
        ctx->cfg.dimensions.empty() ? default_dimensions() : ctx->cfg.dimensions;
    emit(plan_json_out,
         plan_json(dims, ps, sp, max_bid_cpm, impressions_per_setup).dump());
  });
}

adcost_status adcost_simulate(const char* overrides_json, const char* out_dir,
                              char** summary_json) {
  if (!out_dir || !*out_dir)
    return fail_usage("NullArgument", "out_dir is required");
  if (summary_json)
    *summary_json = nullptr;
  return guarded([&] {
    SimConfig cfg = sim_config_from_overrides(overrides_json);
    SimData data = simulate(cfg);
    write_bundle(data, cfg, out_dir);
    ordered_json summary;
    summary["seed"] = cfg.seed;
    summary["users"] = data.user_truth.size();
    summary["impressions"] = data.n_impressions;
    summary["weblog_lines"] = data.weblog.size();
    summary["contributions"] = data.contributions.size();
    summary["tokens"] = data.tokens.size();
    summary["out_dir"] = out_dir;
    emit(summary_json, summary.dump());
  });
}

adcost_status adcost_report(const adcost_ctx* ctx,
                            const char* user_reports_path, const char* out_dir,
                            char** report_json) {
  if (!ctx || !user_reports_path)
    return fail_usage("NullArgument", "ctx and user_reports_path are required");
  if (report_json)
    *report_json = nullptr;
  return guarded([&] {
    std::vector<UserCostReport> reports = read_user_reports(user_reports_path);
    CohortSummary cohort = cohort_stats(reports);
    if (out_dir && *out_dir)
      write_cohort_files(cohort, out_dir);
    ordered_json j;
    j["users"] = cohort.n_users;
    ordered_json rows = ordered_json::array();
    for (const PercentileRow& row : cohort.percentiles) {
      rows.push_back(ordered_json{{"pct", row.pct},
                                  {"total_cpm", row.v_cpm},
                                  {"cleartext_cpm", row.c_cpm},
                                  {"encrypted_cpm", row.e_cpm}});
    }
    j["percentiles"] = std::move(rows);
    const ArpuFactors& f = ctx->cfg.arpu;
    j["arpu"] = ordered_json{{"online_share", f.online_share},
                             {"mobile_share", f.mobile_share},
                             {"http_share", f.http_share},
                             {"rtb_net_share", f.rtb_net_share},
                             {"rtb_of_total_ads", f.rtb_of_total_ads},
                             {"usd_per_cpm_point", extrapolate_arpu(1.0, f)}};
    emit(report_json, j.dump());
  });
}

adcost_status adcost_arpu(const adcost_ctx* ctx, double cpm_sum, double* usd) {
  if (!ctx || !usd)
    return fail_usage("NullArgument", "ctx and usd are required");
  return guarded([&] { *usd = extrapolate_arpu(cpm_sum, ctx->cfg.arpu); });
}

adcost_status adcost_server_start(const char* store_dir,
                                  const char* contributions_path,
                                  const char* host, int port,
                                  adcost_server** out) {
  if (!store_dir || !out)
    return fail_usage("NullArgument", "store_dir and out handle are required");
  *out = nullptr;
  return guarded([&] {
    ServiceConfig cfg;
    cfg.store_dir = store_dir;
    if (contributions_path)
      cfg.contributions_path = contributions_path;
    if (host && *host)
      cfg.host = host;
    cfg.port = port;
    auto server = std::make_unique<adcost_server>();
    server->store_dir = store_dir;
    server->service = std::make_unique<ModelService>(cfg);
    server->service->start();
    server->service->wait_ready();
    server->running = true;
    *out = server.release();
  });
}

adcost_status adcost_server_port(const adcost_server* server, int* port) {
  if (!server || !port)
    return fail_usage("NullArgument", "server and port are required");
  *port = server->service->port();
  tl_error_code.clear();
  tl_error_message.clear();
  return ADCOST_OK;
}

adcost_status adcost_server_publish(adcost_server* server,
                                    const char* model_json, int64_t created_at,
                                    int* version_out) {
  if (!server || !model_json)
    return fail_usage("NullArgument", "server and model_json are required");
  return guarded([&] {
    // Validate before publishing so the store never serves a bad model.
    import_model(model_json);
    ModelStore store(server->store_dir);
    int version = store.publish(model_json, created_at);
    if (version_out)
      *version_out = version;
  });
}

adcost_status adcost_server_stop(adcost_server* server) {
  if (!server)
    return fail_usage("NullArgument", "server is required");
  return guarded([&] {
    if (server->running) {
      server->service->stop();
      server->running = false;
    }
  });
}

void adcost_server_close(adcost_server* server) {
  if (!server)
    return;
  if (server->running)
    server->service->stop();
  delete server;
}

}  // extern "C"
