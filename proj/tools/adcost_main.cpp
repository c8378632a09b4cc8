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

// adcost command line: every subcommand is a thin shell over the C API in
// adcost.h. Exit codes: 0 success, 1 data error, 2 configuration or usage
// error.

#include <chrono>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "adcost.h"

namespace {

namespace fs = std::filesystem;

volatile std::sig_atomic_t g_interrupted = 0;

void on_signal(int) { g_interrupted = 1; }

int exit_code(adcost_status status) {
  switch (status) {
    case ADCOST_OK:
      return 0;
    case ADCOST_ERR_DATA:
      return 1;
    default:
      return 2;
  }
}

int report_failure(adcost_status status) {
  std::cerr << "error [" << adcost_last_error_code()
            << "]: " << adcost_last_error() << "\n";
  return exit_code(status);
}

// Owned C string from the API, released on scope exit.
struct ApiString {
  char* value = nullptr;
  ~ApiString() { adcost_string_free(value); }
  std::string str() const { return value ? value : ""; }
};

struct CtxHandle {
  adcost_ctx* ctx = nullptr;
  ~CtxHandle() { adcost_ctx_close(ctx); }
};

struct ModelHandle {
  adcost_model* model = nullptr;
  ~ModelHandle() { adcost_model_close(model); }
};

struct SessionHandle {
  adcost_session* session = nullptr;
  ~SessionHandle() { adcost_session_close(session); }
};

// Shared --config/--override plumbing: flags beat the config file.
struct CtxFlags {
  std::string config_path;
  std::string blacklist;
  std::string geo;
  std::string iab_map;
  std::string macro_rules;
  std::string model_path;
  std::string window_start;
  std::string window_end;
  std::int64_t binning_k = 0;
  std::int64_t n_trees = 0;
  std::int64_t max_depth = -1;
  std::int64_t min_leaf = 0;
  std::int64_t features_per_split = -1;
  bool regression = false;
  std::int64_t seed = -1;

  CLI::App* sub = nullptr;

  void attach(CLI::App* cmd) {
    sub = cmd;
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--blacklist", blacklist, "Domain blacklist CSV");
    cmd->add_option("--geo", geo, "CIDR to city CSV");
    cmd->add_option("--iab-map", iab_map, "Domain to IAB category CSV");
    cmd->add_option("--macro-rules", macro_rules, "nURL macro rule file");
    cmd->add_option("--model", model_path, "Trained price model JSON");
    cmd->add_option("--window-start", window_start,
                    "Accounting window start (epoch ms or RFC 3339)");
    cmd->add_option("--window-end", window_end,
                    "Accounting window end (epoch ms or RFC 3339)");
    cmd->add_option("--classes", binning_k, "Price class count");
    cmd->add_option("--trees", n_trees, "Forest size");
    cmd->add_option("--max-depth", max_depth, "Tree depth cap, 0 = unbounded");
    cmd->add_option("--min-leaf", min_leaf, "Minimum samples per leaf");
    cmd->add_option("--mtry", features_per_split,
                    "Feature draws per split, 0 = sqrt rule");
    cmd->add_flag("--regression", regression,
                  "Regression forest instead of classification");
    cmd->add_option("--seed", seed, "Deterministic seed");
  }

  adcost_status apply(adcost_ctx* ctx) const {
    auto set = [&](const char* key, const std::string& value) {
      return adcost_ctx_set(ctx, key, value.c_str());
    };
    adcost_status st = ADCOST_OK;
    auto run = [&](bool given, const char* key, const std::string& value) {
      if (st == ADCOST_OK && given)
        st = set(key, value);
    };
    run(!blacklist.empty(), "paths.blacklist", blacklist);
    run(!geo.empty(), "paths.geo", geo);
    run(!iab_map.empty(), "paths.iab_map", iab_map);
    run(!macro_rules.empty(), "paths.macro_rules", macro_rules);
    run(!model_path.empty(), "paths.model", model_path);
    run(!window_start.empty(), "window.start", window_start);
    run(!window_end.empty(), "window.end", window_end);
    run(sub->count("--classes") > 0, "binning.k", std::to_string(binning_k));
    run(sub->count("--trees") > 0, "forest.n_trees", std::to_string(n_trees));
    run(sub->count("--max-depth") > 0, "forest.max_depth",
        std::to_string(max_depth));
    run(sub->count("--min-leaf") > 0, "forest.min_leaf",
        std::to_string(min_leaf));
    run(sub->count("--mtry") > 0, "forest.features_per_split",
        std::to_string(features_per_split));
    run(sub->count("--regression") > 0, "forest.regression",
        regression ? "true" : "false");
    run(sub->count("--seed") > 0, "seed", std::to_string(seed));
    return st;
  }

  adcost_status open(CtxHandle& handle) const {
    adcost_status st = adcost_ctx_open(
        config_path.empty() ? nullptr : config_path.c_str(), &handle.ctx);
    if (st != ADCOST_OK)
      return st;
    return apply(handle.ctx);
  }
};

int write_text_file(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path())
    fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!text.empty() && text.back() != '\n')
    out << '\n';
  if (!out) {
    std::cerr << "error [WriteFailed]: cannot write " << path << "\n";
    return 1;
  }
  return 0;
}

int cmd_simulate(const std::string& out_dir, const nlohmann::ordered_json& overrides) {
  ApiString summary;
  std::string text = overrides.empty() ? "" : overrides.dump();
  adcost_status st = adcost_simulate(text.empty() ? nullptr : text.c_str(),
                                     out_dir.c_str(), &summary.value);
  if (st != ADCOST_OK)
    return report_failure(st);
  std::cout << summary.str() << "\n";
  return 0;
}

int cmd_analyze(const CtxFlags& flags, const std::string& input,
                bool use_stdin, const std::string& format,
                const std::string& out_dir) {
  CtxHandle ctx;
  adcost_status st = flags.open(ctx);
  if (st != ADCOST_OK)
    return report_failure(st);

  ApiString summary;
  if (use_stdin) {
    SessionHandle session;
    st = adcost_session_open(ctx.ctx, nullptr, format.c_str(), &session.session);
    if (st != ADCOST_OK)
      return report_failure(st);
    std::string line;
    while (std::getline(std::cin, line)) {
      st = adcost_session_feed_line(session.session, line.c_str());
      if (st != ADCOST_OK)
        return report_failure(st);
    }
    st = adcost_session_finish(session.session,
                               out_dir.empty() ? nullptr : out_dir.c_str(),
                               &summary.value);
  } else {
    st = adcost_analyze_file(ctx.ctx, nullptr, input.c_str(), format.c_str(),
                             out_dir.empty() ? nullptr : out_dir.c_str(),
                             &summary.value);
  }
  if (st != ADCOST_OK)
    return report_failure(st);
  std::cout << summary.str() << "\n";
  return 0;
}

int cmd_train(const CtxFlags& flags, const std::string& input,
              const std::string& contributions, const std::string& format,
              bool variance_filter, bool feature_selection,
              const std::string& out_dir) {
  CtxHandle ctx;
  adcost_status st = flags.open(ctx);
  if (st != ADCOST_OK)
    return report_failure(st);
  ApiString summary;
  st = adcost_train(ctx.ctx, input.empty() ? nullptr : input.c_str(),
                    contributions.empty() ? nullptr : contributions.c_str(),
                    format.c_str(), variance_filter ? 1 : 0,
                    feature_selection ? 1 : 0,
                    out_dir.empty() ? nullptr : out_dir.c_str(),
                    &summary.value);
  if (st != ADCOST_OK)
    return report_failure(st);
  std::cout << summary.str() << "\n";
  return 0;
}

int cmd_evaluate(const CtxFlags& flags, const std::string& input,
                 const std::string& contributions, const std::string& format,
                 int folds, int runs, const std::string& out_dir) {
  CtxHandle ctx;
  adcost_status st = flags.open(ctx);
  if (st != ADCOST_OK)
    return report_failure(st);
  ApiString metrics;
  st = adcost_evaluate(ctx.ctx, input.empty() ? nullptr : input.c_str(),
                       contributions.empty() ? nullptr : contributions.c_str(),
                       format.c_str(), folds, runs, &metrics.value);
  if (st != ADCOST_OK)
    return report_failure(st);
  if (!out_dir.empty()) {
    int rc = write_text_file((fs::path(out_dir) / "metrics.json").string(),
                             metrics.str());
    if (rc != 0)
      return rc;
  }
  std::cout << metrics.str() << "\n";
  return 0;
}

int cmd_plan(const CtxFlags& flags, const std::string& strategy, double std_cpm,
             double alpha, double margin, int n_per_setup, double max_bid,
             long long impressions, const std::string& out_dir) {
  CtxHandle ctx;
  adcost_status st = flags.open(ctx);
  if (st != ADCOST_OK)
    return report_failure(st);
  ApiString plan;
  st = adcost_plan(ctx.ctx, strategy.c_str(), std_cpm, alpha, margin,
                   n_per_setup, max_bid, impressions, &plan.value);
  if (st != ADCOST_OK)
    return report_failure(st);
  if (!out_dir.empty()) {
    int rc = write_text_file((fs::path(out_dir) / "plan.json").string(),
                             plan.str());
    if (rc != 0)
      return rc;
  }
  std::cout << plan.str() << "\n";
  return 0;
}

int cmd_report(const CtxFlags& flags, const std::string& input,
               const std::string& out_dir, const std::vector<double>& cpms) {
  CtxHandle ctx;
  adcost_status st = flags.open(ctx);
  if (st != ADCOST_OK)
    return report_failure(st);
  ApiString report;
  st = adcost_report(ctx.ctx, input.c_str(),
                     out_dir.empty() ? nullptr : out_dir.c_str(),
                     &report.value);
  if (st != ADCOST_OK)
    return report_failure(st);
  std::cout << report.str() << "\n";
  for (double cpm : cpms) {
    double usd = 0;
    st = adcost_arpu(ctx.ctx, cpm, &usd);
    if (st != ADCOST_OK)
      return report_failure(st);
    nlohmann::ordered_json line;
    line["cpm"] = cpm;
    line["arpu_usd"] = usd;
    std::cout << line.dump() << "\n";
  }
  return 0;
}

int cmd_serve(const std::string& store_dir, const std::string& contributions,
              const std::string& host, int port) {
  adcost_server* server = nullptr;
  adcost_status st = adcost_server_start(
      store_dir.c_str(), contributions.empty() ? nullptr : contributions.c_str(),
      host.empty() ? nullptr : host.c_str(), port, &server);
  if (st != ADCOST_OK)
    return report_failure(st);
  int bound = 0;
  adcost_server_port(server, &bound);
  nlohmann::ordered_json line;
  line["host"] = host.empty() ? "127.0.0.1" : host;
  line["port"] = bound;
  std::cout << line.dump() << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted)
    std::this_thread::sleep_for(std::chrono::milliseconds(100));

  adcost_server_stop(server);
  adcost_server_close(server);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RTB advertising cost toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a deterministic RTB traffic bundle");
  std::string sim_out;
  std::int64_t sim_seed = 0, sim_users = 0, sim_impressions = 0, sim_days = 0;
  double sim_base = 0, sim_sigma = 0;
  bool sim_adx_only = false;
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--seed", sim_seed, "Simulation seed");
  sim->add_option("--users", sim_users, "Simulated user count");
  sim->add_option("--impressions", sim_impressions, "Target impression count");
  sim->add_option("--days", sim_days, "Simulated duration in days");
  sim->add_option("--base-cpm", sim_base, "Price law base CPM");
  sim->add_option("--noise-sigma", sim_sigma, "Lognormal price noise sigma");
  sim->add_flag("--adx-only", sim_adx_only,
                "Price depends on the exchange alone (diagnostic mode)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Compute per-user advertiser cost from a weblog");
  CtxFlags analyze_flags;
  analyze_flags.attach(analyze);
  std::string an_input, an_format = "jsonl", an_out;
  bool an_stdin = false;
  analyze->add_option("--input", an_input, "Weblog path (.gz accepted)");
  analyze->add_flag("--stdin", an_stdin, "Stream records from standard input");
  analyze->add_option("--format", an_format, "Input format: jsonl or csv");
  analyze->add_option("--out", an_out, "Report output directory");

  // train
  auto* train = app.add_subcommand("train", "Fit the charge price model");
  CtxFlags train_flags;
  train_flags.attach(train);
  std::string tr_input, tr_contributions, tr_format = "jsonl", tr_out;
  bool tr_variance = false, tr_selection = false;
  train->add_option("--input", tr_input, "Weblog with cleartext charges");
  train->add_option("--contributions", tr_contributions,
                    "Probe campaign contributions JSONL");
  train->add_option("--format", tr_format, "Weblog format: jsonl or csv");
  train->add_flag("--variance-filter", tr_variance,
                  "Drop constant and volatile one-hot columns");
  train->add_flag("--feature-selection", tr_selection,
                  "Search feature groups before fitting");
  train->add_option("--out", tr_out, "Directory for model.json");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate the price model");
  CtxFlags eval_flags;
  eval_flags.attach(evaluate);
  std::string ev_input, ev_contributions, ev_format = "jsonl", ev_out;
  int ev_folds = 10, ev_runs = 10;
  evaluate->add_option("--input", ev_input, "Weblog with cleartext charges");
  evaluate->add_option("--contributions", ev_contributions,
                       "Probe campaign contributions JSONL");
  evaluate->add_option("--format", ev_format, "Weblog format: jsonl or csv");
  evaluate->add_option("--folds", ev_folds, "Cross validation folds");
  evaluate->add_option("--runs", ev_runs, "Cross validation repetitions");
  evaluate->add_option("--out", ev_out, "Directory for metrics.json");

  // plan
  auto* plan = app.add_subcommand("plan", "Enumerate probe campaign setups and sample sizes");
  CtxFlags plan_flags;
  plan_flags.attach(plan);
  std::string pl_strategy = "paper_144", pl_out;
  bool pl_paper = false, pl_full = false;
  double pl_std = 0, pl_alpha = 0.05, pl_margin = 0, pl_max_bid = 0;
  int pl_n = 0;
  long long pl_impressions = 0;
  plan->add_option("--strategy", pl_strategy, "full_cross or paper_144");
  plan->add_flag("--paper-144", pl_paper, "Shorthand for --strategy paper_144");
  plan->add_flag("--full-cross", pl_full, "Shorthand for --strategy full_cross");
  plan->add_option("--std", pl_std, "Charge standard deviation in CPM");
  plan->add_option("--alpha", pl_alpha, "Two-sided significance level");
  plan->add_option("--margin", pl_margin, "Target margin of error in CPM");
  plan->add_option("--n", pl_n, "Report margin of error for this sample size");
  plan->add_option("--max-bid", pl_max_bid, "Budget cap bid in CPM");
  plan->add_option("--impressions", pl_impressions,
                   "Impressions per setup for budgeting");
  plan->add_option("--out", pl_out, "Directory for plan.json");

  // report
  auto* rep = app.add_subcommand("report", "Cohort rollup over existing user reports");
  CtxFlags rep_flags;
  rep_flags.attach(rep);
  std::string rp_input, rp_out;
  std::vector<double> rp_cpms;
  rep->add_option("--input", rp_input, "user_reports.jsonl path")->required();
  rep->add_option("--out", rp_out, "Directory for cohort CSVs");
  rep->add_option("--cpm", rp_cpms, "CPM sums to extrapolate to ARPU USD");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the model distribution service");
  std::string sv_store, sv_contributions, sv_host = "127.0.0.1";
  int sv_port = 0;
  serve->add_option("--store", sv_store, "Model store directory")->required();
  serve->add_option("--contributions", sv_contributions,
                    "Contribution sink JSONL path");
  serve->add_option("--host", sv_host, "Bind address");
  serve->add_option("--port", sv_port, "Port, 0 picks a free one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (sim->parsed()) {
    nlohmann::ordered_json overrides = nlohmann::ordered_json::object();
    if (sim->count("--seed"))
      overrides["seed"] = sim_seed;
    if (sim->count("--users"))
      overrides["n_users"] = sim_users;
    if (sim->count("--impressions"))
      overrides["target_impressions"] = sim_impressions;
    if (sim->count("--days"))
      overrides["duration_days"] = sim_days;
    if (sim->count("--base-cpm"))
      overrides["base_cpm"] = sim_base;
    if (sim->count("--noise-sigma"))
      overrides["noise_sigma"] = sim_sigma;
    if (sim->count("--adx-only"))
      overrides["adx_only"] = sim_adx_only;
    return cmd_simulate(sim_out, overrides);
  }
  if (analyze->parsed()) {
    if (an_input.empty() && !an_stdin) {
      std::cerr << "error [MissingInput]: analyze needs --input or --stdin\n";
      return 2;
    }
    return cmd_analyze(analyze_flags, an_input, an_stdin, an_format, an_out);
  }
  if (train->parsed())
    return cmd_train(train_flags, tr_input, tr_contributions, tr_format,
                     tr_variance, tr_selection, tr_out);
  if (evaluate->parsed())
    return cmd_evaluate(eval_flags, ev_input, ev_contributions, ev_format,
                        ev_folds, ev_runs, ev_out);
  if (plan->parsed()) {
    if (pl_paper && pl_full) {
      std::cerr << "error [BadStrategy]: pick one of --paper-144, --full-cross\n";
      return 2;
    }
    if (pl_paper)
      pl_strategy = "paper_144";
    if (pl_full)
      pl_strategy = "full_cross";
    return cmd_plan(plan_flags, pl_strategy, pl_std, pl_alpha, pl_margin, pl_n,
                    pl_max_bid, pl_impressions, pl_out);
  }
  if (rep->parsed())
    return cmd_report(rep_flags, rp_input, rp_out, rp_cpms);
  if (serve->parsed())
    return cmd_serve(sv_store, sv_contributions, sv_host, sv_port);
  return 2;
}
