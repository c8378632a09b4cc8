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
#include <map>
#include <string>
#include <vector>

#include "common/money.hpp"
#include "features/features.hpp"
#include "model/binning.hpp"

namespace adcost {

struct Bid {
  std::string dsp;
  MicroCpm cpm = 0;
};

struct AuctionResult {
  size_t winner_index = 0;
  std::string winner_dsp;
  MicroCpm winning_bid = 0;
  MicroCpm charge = 0;  // highest losing bid; charge <= winning_bid
};

// Second-price rules: highest bid wins (ties go to the earliest bidder),
// the winner pays the best losing bid. Throws Error(Data, "TooFewBids")
// below two bids and Error(Data, "NonPositiveBid") on bids <= 0.
AuctionResult run_auction(const std::vector<Bid>& bids);

// Keyed invertible 28-byte encoding rendered as 38 base64url chars:
// [8B price ^ prf][4B nonce ^ prf][16B keyed digest]. Distinct
// (price, nonce) pairs yield distinct tokens; unseal verifies the digest
// and throws Error(Data, "BadToken") on anything else.
std::string encode_price(MicroCpm cpm, std::uint64_t key, std::uint32_t nonce = 0);
MicroCpm unseal(std::string_view token, std::uint64_t key);

// Multiplicative charge law over the model's feature tuple: base CPM times
// one factor per feature level, times lognormal(sigma) noise drawn by the
// caller. adx_only mode drops every factor except the exchange's.
struct PriceLaw {
  double base_cpm = 0.8;
  double noise_sigma = 0.3;
  bool adx_only = false;
  std::map<std::string, double> adx_mult;
  std::map<std::string, double> interaction_mult;
  std::map<std::string, double> os_mult;
  std::map<std::string, double> device_mult;
  std::map<std::string, double> tod_mult;
  std::map<std::string, double> dow_mult;
  std::map<std::string, double> size_mult;
  std::map<std::string, double> city_mult;
  std::map<std::string, double> iab_mult;
  double hour_slope = 0.02;  // per-hour ramp on top of the tod factor
};

double deterministic_cpm(const PriceLaw& law, const CoreFeatures& s);

enum class NurlTemplate { clear_a, clear_b, enc_a, enc_b };

struct SimAdx {
  std::string adx_id;
  std::string host;
  NurlTemplate tmpl = NurlTemplate::clear_a;
};

bool template_encrypted(NurlTemplate t);

struct SimPublisher {
  std::string domain;
  std::string iab;
};

struct SimConfig {
  std::uint64_t seed = 1;
  int n_users = 400;
  long long target_impressions = 24000;
  int duration_days = 14;
  std::uint64_t token_key = 0x5EA1ED0DECADEULL;
  std::vector<SimPublisher> publishers;
  std::vector<SimAdx> adxs;
  std::vector<std::string> dsps;  // >= 2, second price needs a runner-up
  PriceLaw price_law;
};

SimConfig default_sim_config();

struct SimUserTruth {
  MicroCpm cleartext_micro = 0;
  MicroCpm encrypted_micro = 0;
};

struct SealedToken {
  MicroCpm cpm = 0;
  int cls = 0;
  CoreFeatures features;
};

struct SimData {
  std::vector<std::string> weblog;         // JSONL lines, time-ordered
  std::vector<std::string> contributions;  // probe ground truth JSONL
  PriceBinning reference_binning;
  std::map<std::string, SealedToken> tokens;
  std::map<std::string, SimUserTruth> user_truth;
  size_t n_impressions = 0;
};

// Boundaries at the k-quantiles of log charge (midpoints between distinct
// values when there are exactly k of them); representatives are per-class
// lower medians. Charges must be positive.
PriceBinning reference_binning_from_charges(const std::vector<MicroCpm>& charges,
                                            int k = 4);

// Deterministic in cfg: equal configs produce byte-identical bundles.
SimData simulate(const SimConfig& cfg);

// Writes weblog.jsonl, sealed_ledger.json, contributions.jsonl,
// macro_rules.json, blacklist.csv, geo.csv, iab_map.csv and config.json
// under out_dir, creating it if needed.
void write_bundle(const SimData& data, const SimConfig& cfg,
                  const std::string& out_dir);

// The detection rules matching this simulator's nURL templates plus the
// stock exchange patterns, as a rules-file JSON document.
std::string sim_macro_rules_json(const SimConfig& cfg);

}  // namespace adcost
