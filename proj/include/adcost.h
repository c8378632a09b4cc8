/* Copyright 2026 The adcost Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the adcost toolkit: weblog cost analysis, price model
 * training, campaign planning, traffic simulation, and the model service.
 *
 * Conventions:
 *   - Every fallible call returns an adcost_status; on failure
 *     adcost_last_error() / adcost_last_error_code() describe the cause
 *     for the calling thread.
 *   - char** outputs receive a NUL-terminated heap string owned by the
 *     caller; release it with adcost_string_free().
 *   - Handles are opaque and single-owner; close functions accept NULL.
 *   - A session borrows its context and model, which must stay alive
 *     until the session is closed. Handles are not thread-safe.
 */

#ifndef ADCOST_H_
#define ADCOST_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ADCOST_API __declspec(dllexport)
#else
#define ADCOST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Mirrors process exit codes: data errors map to 1, configuration errors
 * to 2. Usage errors are caller bugs (bad arguments, wrong call order). */
typedef enum adcost_status {
  ADCOST_OK = 0,
  ADCOST_ERR_DATA = 1,
  ADCOST_ERR_CONFIG = 2,
  ADCOST_ERR_USAGE = 3
} adcost_status;

typedef struct adcost_ctx adcost_ctx;
typedef struct adcost_model adcost_model;
typedef struct adcost_session adcost_session;
typedef struct adcost_server adcost_server;

ADCOST_API const char* adcost_version(void);

/* Thread-local description of the most recent failure; empty strings when
 * the last call on this thread succeeded. The code is a stable identifier
 * such as "ModelRequired" or "UnknownConfigKey". */
ADCOST_API const char* adcost_last_error(void);
ADCOST_API const char* adcost_last_error_code(void);

ADCOST_API void adcost_string_free(char* s);

/* ---- Context: configuration plus loaded reference tables ---- */

/* config_path may be NULL for built-in defaults. The JSON schema is
 * strict: unknown keys are rejected and referenced files must exist. */
ADCOST_API adcost_status adcost_ctx_open(const char* config_path,
                                         adcost_ctx** out);

/* Single-field override, applied after the config file (flag beats file
 * beats default). Keys use dotted paths: paths.blacklist, paths.geo,
 * paths.iab_map, paths.macro_rules, paths.model, binning.k,
 * forest.n_trees, forest.max_depth, forest.min_leaf,
 * forest.features_per_split, forest.regression, arpu.online_share,
 * arpu.mobile_share, arpu.http_share, arpu.rtb_net_share,
 * arpu.rtb_of_total_ads, window.start, window.end, seed. Window edges
 * accept epoch milliseconds or RFC 3339 timestamps. */
ADCOST_API adcost_status adcost_ctx_set(adcost_ctx* ctx, const char* key,
                                        const char* value);

ADCOST_API void adcost_ctx_close(adcost_ctx* ctx);

/* ---- Price model handles ---- */

ADCOST_API adcost_status adcost_model_load(const char* path,
                                           adcost_model** out);
ADCOST_API adcost_status adcost_model_import(const char* json_text,
                                             adcost_model** out);
ADCOST_API adcost_status adcost_model_export(const adcost_model* model,
                                             char** json_out);

/* features_json carries exactly the ten model features: interaction,
 * device_type, os, city, tod_bucket, day_of_week, ad_size, publisher_iab,
 * adx_id (strings) and hour_of_day (integer 0..23). Outputs the estimated
 * charge in micro CPM and the predicted price class; either output
 * pointer may be NULL. */
ADCOST_API adcost_status adcost_model_estimate(const adcost_model* model,
                                               const char* features_json,
                                               int64_t* micro_cpm,
                                               int* price_class);

ADCOST_API void adcost_model_close(adcost_model* model);

/* ---- Streaming cost analysis ---- */

/* format is "jsonl" or "csv" (NULL means "jsonl"). model may be NULL;
 * encrypted notifications then fail the feed with "ModelRequired". */
ADCOST_API adcost_status adcost_session_open(const adcost_ctx* ctx,
                                             const adcost_model* model,
                                             const char* format,
                                             adcost_session** out);

/* One raw log line. Malformed lines count as skipped, not as errors. */
ADCOST_API adcost_status adcost_session_feed_line(adcost_session* session,
                                                  const char* line);

/* Running totals for one user, in micro CPM. Unknown user is a data
 * error. Any output pointer may be NULL. */
ADCOST_API adcost_status adcost_session_user_total(const adcost_session* session,
                                                   const char* user_id,
                                                   int64_t* cleartext_micro,
                                                   int64_t* encrypted_micro,
                                                   int64_t* total_micro);

/* Builds per-user and cohort reports from everything fed so far. When
 * out_dir is non-NULL, writes user_reports.jsonl, cohort.csv,
 * cohort_cdf.csv and cohort_iab.csv there. summary_json receives run
 * counters. The session remains usable. */
ADCOST_API adcost_status adcost_session_finish(adcost_session* session,
                                               const char* out_dir,
                                               char** summary_json);

ADCOST_API void adcost_session_close(adcost_session* session);

/* ---- One-shot operations ---- */

/* Reads input_path (".gz" accepted), orders records by time, analyzes,
 * and writes the report files to out_dir (optional, as in
 * adcost_session_finish). */
ADCOST_API adcost_status adcost_analyze_file(const adcost_ctx* ctx,
                                             const adcost_model* model,
                                             const char* input_path,
                                             const char* format,
                                             const char* out_dir,
                                             char** summary_json);

/* Trains a price model from cleartext charges. log_path and
 * contributions_path may each be NULL but not both; samples pool. Writes
 * model.json (and selection.json when feature selection ran) to out_dir
 * when given. */
ADCOST_API adcost_status adcost_train(const adcost_ctx* ctx,
                                      const char* log_path,
                                      const char* contributions_path,
                                      const char* format,
                                      int variance_filter,
                                      int feature_selection,
                                      const char* out_dir,
                                      char** summary_json);

/* Stratified cross validation over the same inputs as adcost_train.
 * folds/runs values below 1 default to 10. */
ADCOST_API adcost_status adcost_evaluate(const adcost_ctx* ctx,
                                         const char* log_path,
                                         const char* contributions_path,
                                         const char* format,
                                         int folds, int runs,
                                         char** metrics_json);

/* Campaign plan. strategy is "full_cross" or "paper_144"; dimensions come
 * from the context config (stock dimensions when unconfigured).
 * margin_cpm > 0 derives the per-setup sample size; n_per_setup > 0
 * reports its margin of error; impressions_per_setup <= 0 falls back to
 * the derived sample size for budgeting. */
ADCOST_API adcost_status adcost_plan(const adcost_ctx* ctx,
                                     const char* strategy,
                                     double std_cpm, double alpha,
                                     double margin_cpm, int n_per_setup,
                                     double max_bid_cpm,
                                     long long impressions_per_setup,
                                     char** plan_json);

/* Deterministic RTB traffic bundle under out_dir: weblog.jsonl,
 * contributions.jsonl, sealed_ledger.json, macro_rules.json,
 * blacklist.csv, geo.csv, iab_map.csv, config.json. overrides_json may be
 * NULL or an object with any of: seed, n_users, target_impressions,
 * duration_days, base_cpm, noise_sigma, adx_only. */
ADCOST_API adcost_status adcost_simulate(const char* overrides_json,
                                         const char* out_dir,
                                         char** summary_json);

/* Cohort rollup from an existing user_reports.jsonl; writes cohort CSVs
 * to out_dir when given. */
ADCOST_API adcost_status adcost_report(const adcost_ctx* ctx,
                                       const char* user_reports_path,
                                       const char* out_dir,
                                       char** report_json);

/* Revenue a network would need per user: cpm_sum across the period,
 * divided by 1000 and by the configured traffic share factors. */
ADCOST_API adcost_status adcost_arpu(const adcost_ctx* ctx, double cpm_sum,
                                     double* usd);

/* ---- Model distribution service ---- */

/* Starts the HTTP service on a background thread. port 0 picks a free
 * port; contributions_path may be NULL to reject POST /contribute with
 * a store error. */
ADCOST_API adcost_status adcost_server_start(const char* store_dir,
                                             const char* contributions_path,
                                             const char* host, int port,
                                             adcost_server** out);
ADCOST_API adcost_status adcost_server_port(const adcost_server* server,
                                            int* port);

/* Adds a model document to the store; the running server picks it up on
 * the next request. version_out may be NULL. */
ADCOST_API adcost_status adcost_server_publish(adcost_server* server,
                                               const char* model_json,
                                               int64_t created_at,
                                               int* version_out);

ADCOST_API adcost_status adcost_server_stop(adcost_server* server);
ADCOST_API void adcost_server_close(adcost_server* server);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ADCOST_H_ */
