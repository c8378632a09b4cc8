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

#include "sim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/timeutil.hpp"
#include "common/url.hpp"
#include "features/feature_json.hpp"

namespace adcost {

namespace {

using nlohmann::ordered_json;

// Friday 2015-05-15 00:00:00 UTC, an exact midnight.
constexpr EpochMs kSimEpochMs = 1431648000000LL;
constexpr double kPi = 3.14159265358979323846;
constexpr MicroCpm kMicroClamp = MicroCpm{10'000} * kMicrosPerCpm - 1;

constexpr const char* kCities[4] = {"Madrid", "Barcelona", "Valencia", "Seville"};

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t prf(std::uint64_t key, std::uint64_t block, std::uint64_t salt) {
  return mix64(key ^ mix64(block ^ mix64(salt)));
}

constexpr char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::string b64url_encode(const std::uint8_t* data, size_t n) {
  std::string out;
  out.reserve((n * 4 + 2) / 3);
  size_t i = 0;
  for (; i + 3 <= n; i += 3) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back(kB64[v & 63]);
  }
  if (i + 1 == n) {
    std::uint32_t v = data[i] << 16;
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
  } else if (i + 2 == n) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
  }
  return out;
}

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '-') return 62;
  if (c == '_') return 63;
  return -1;
}

bool b64url_decode(std::string_view s, std::uint8_t* out, size_t want) {
  if (s.size() != (want * 4 + 2) / 3) return false;
  size_t oi = 0, i = 0;
  for (; i + 4 <= s.size(); i += 4) {
    int a = b64_value(s[i]), b = b64_value(s[i + 1]), c = b64_value(s[i + 2]),
        d = b64_value(s[i + 3]);
    if (a < 0 || b < 0 || c < 0 || d < 0) return false;
    std::uint32_t v = (a << 18) | (b << 12) | (c << 6) | d;
    out[oi++] = (v >> 16) & 0xFF;
    out[oi++] = (v >> 8) & 0xFF;
    out[oi++] = v & 0xFF;
  }
  size_t rest = s.size() - i;
  if (rest == 2) {
    int a = b64_value(s[i]), b = b64_value(s[i + 1]);
    if (a < 0 || b < 0 || (b & 0x0F) != 0) return false;
    out[oi++] = (a << 2) | (b >> 4);
  } else if (rest == 3) {
    int a = b64_value(s[i]), b = b64_value(s[i + 1]), c = b64_value(s[i + 2]);
    if (a < 0 || b < 0 || c < 0 || (c & 0x03) != 0) return false;
    std::uint32_t v = (a << 12) | (b << 6) | c;
    out[oi++] = (v >> 10) & 0xFF;
    out[oi++] = (v >> 2) & 0xFF;
  } else if (rest != 0) {
    return false;
  }
  return oi == want;
}

void store64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t load64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

void store32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t load32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

void digest128(std::uint64_t key, std::uint64_t cpm, std::uint32_t nonce,
               std::uint64_t& d1, std::uint64_t& d2) {
  std::uint64_t h = mix64(key ^ mix64(cpm ^ mix64(nonce ^ 0x5A5A5A5AULL)));
  d1 = mix64(h ^ 0x1111111111111111ULL);
  d2 = mix64(h ^ 0x2222222222222222ULL);
}

// Portable uniform in (0,1): top 53 bits of the engine output.
double unit_open(std::mt19937_64& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double normal_draw(std::mt19937_64& g) {
  double u1 = unit_open(g);
  double u2 = unit_open(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double mult_of(const std::map<std::string, double>& m, const std::string& key) {
  auto it = m.find(key);
  return it == m.end() ? 1.0 : it->second;
}

}  // namespace

AuctionResult run_auction(const std::vector<Bid>& bids) {
  if (bids.size() < 2) {
    throw_data("TooFewBids", "second price needs at least two bids");
  }
  size_t win = 0;
  for (size_t i = 0; i < bids.size(); ++i) {
    if (bids[i].cpm <= 0) throw_data("NonPositiveBid", "bids must be positive");
    if (bids[i].cpm > bids[win].cpm) win = i;
  }
  MicroCpm charge = 0;
  for (size_t i = 0; i < bids.size(); ++i) {
    if (i != win) charge = std::max(charge, bids[i].cpm);
  }
  return {win, bids[win].dsp, bids[win].cpm, charge};
}

std::string encode_price(MicroCpm cpm, std::uint64_t key, std::uint32_t nonce) {
  if (cpm <= 0) throw_data("NonPositivePrice", "token prices must be positive");
  std::uint8_t b[28];
  store64(b, static_cast<std::uint64_t>(cpm) ^ prf(key, nonce, 1));
  store32(b + 8, nonce ^ static_cast<std::uint32_t>(prf(key, 0, 2)));
  std::uint64_t d1 = 0, d2 = 0;
  digest128(key, static_cast<std::uint64_t>(cpm), nonce, d1, d2);
  store64(b + 12, d1);
  store64(b + 20, d2);
  return b64url_encode(b, 28);
}

MicroCpm unseal(std::string_view token, std::uint64_t key) {
  std::uint8_t b[28];
  if (token.size() != 38 || !b64url_decode(token, b, 28)) {
    throw_data("BadToken", "token is not a sealed price");
  }
  std::uint32_t nonce = load32(b + 8) ^ static_cast<std::uint32_t>(prf(key, 0, 2));
  std::uint64_t cpm_bits = load64(b) ^ prf(key, nonce, 1);
  std::uint64_t d1 = 0, d2 = 0;
  digest128(key, cpm_bits, nonce, d1, d2);
  if (d1 != load64(b + 12) || d2 != load64(b + 20)) {
    throw_data("BadToken", "token digest mismatch");
  }
  auto cpm = static_cast<MicroCpm>(cpm_bits);
  if (cpm <= 0) throw_data("BadToken", "token price out of range");
  return cpm;
}

double deterministic_cpm(const PriceLaw& law, const CoreFeatures& s) {
  double v = law.base_cpm * mult_of(law.adx_mult, s.adx_id);
  if (law.adx_only) return v;
  v *= mult_of(law.interaction_mult, s.interaction);
  v *= mult_of(law.os_mult, s.os);
  v *= mult_of(law.device_mult, s.device_type);
  v *= mult_of(law.tod_mult, s.tod_bucket);
  v *= mult_of(law.dow_mult, s.day_of_week);
  v *= mult_of(law.size_mult, s.ad_size);
  v *= mult_of(law.city_mult, s.city);
  v *= mult_of(law.iab_mult, s.publisher_iab);
  v *= 1.0 + law.hour_slope * (s.hour_of_day - 12);
  return v;
}

bool template_encrypted(NurlTemplate t) {
  return t == NurlTemplate::enc_a || t == NurlTemplate::enc_b;
}

SimConfig default_sim_config() {
  SimConfig cfg;
  cfg.publishers = {
      {"moviebuzz.test", "IAB1"},     {"caranddrive.test", "IAB2"},
      {"health-line.test", "IAB7"},   {"recipes-corner.test", "IAB8"},
      {"games-zone.test", "IAB9"},    {"news-daily.test", "IAB12"},
      {"finance-hub.test", "IAB13"},  {"petsworld.test", "IAB16"},
      {"sports-arena.test", "IAB17"}, {"style-mag.test", "IAB18"},
      {"techwire.test", "IAB19"},     {"traveldeals.test", "IAB20"},
  };
  cfg.adxs = {
      {"clearbid", "imp.clearbid.test", NurlTemplate::clear_a},
      {"pricenote", "win.pricenote.test", NurlTemplate::clear_b},
      {"cryptadx", "n.cryptadx.test", NurlTemplate::enc_a},
      {"sealedx", "t.sealedx.test", NurlTemplate::enc_b},
  };
  cfg.dsps = {"dsp-alpha.test", "dsp-beta.test", "dsp-gamma.test"};

  PriceLaw& law = cfg.price_law;
  law.adx_mult = {{"clearbid", 0.2}, {"pricenote", 1.0}, {"cryptadx", 4.5}, {"sealedx", 20.0}};
  law.interaction_mult = {{"app", 2.6}, {"mobile_web", 1.0}, {"desktop_web", 0.8}};
  law.os_mult = {{"ios", 1.3}, {"android", 1.0}, {"windows", 1.0}};
  law.device_mult = {{"tablet", 1.15}, {"smartphone", 1.0}, {"pc", 1.0}};
  law.tod_mult = {{"12am-9am", 0.6}, {"9am-6pm", 1.0}, {"6pm-12am", 1.6}};
  law.dow_mult = {{"mon", 1.1}, {"tue", 1.1}, {"wed", 1.1}, {"thu", 1.1},
                  {"fri", 1.1}, {"sat", 0.92}, {"sun", 0.95}};
  law.size_mult = {{"320x50", 0.5},  {"300x250", 1.2},  {"320x480", 2.5},
                   {"728x90", 0.6},  {"768x1024", 2.2}, {"1024x768", 2.2}};
  law.city_mult = {{"Madrid", 1.5}, {"Barcelona", 1.25}, {"Valencia", 0.7}, {"Seville", 1.0}};
  law.iab_mult = {{"IAB1", 0.3},  {"IAB2", 1.8},  {"IAB7", 2.2},  {"IAB8", 0.8},
                  {"IAB9", 0.5},  {"IAB12", 1.0}, {"IAB13", 3.0}, {"IAB16", 0.6},
                  {"IAB17", 1.3}, {"IAB18", 1.2}, {"IAB19", 1.6}, {"IAB20", 1.4}};
  return cfg;
}

PriceBinning reference_binning_from_charges(const std::vector<MicroCpm>& charges,
                                            int k) {
  if (k < 1) throw_usage("BadClassCount", "class count must be >= 1");
  if (charges.empty()) throw_data("TooFewSamples", "no charges to bin");
  std::vector<double> logs = log_normalize(charges);
  std::sort(logs.begin(), logs.end());
  std::vector<double> distinct = logs;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (static_cast<int>(distinct.size()) < k) {
    throw_data("TooFewDistinct", "fewer distinct charges than classes");
  }

  PriceBinning bin;
  bin.k = k;
  if (static_cast<int>(distinct.size()) == k) {
    for (int i = 0; i + 1 < k; ++i) {
      bin.boundaries.push_back(0.5 * (distinct[i] + distinct[i + 1]));
    }
  } else {
    size_t n = logs.size();
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < k; ++i) {
      size_t pos = n * static_cast<size_t>(i) / static_cast<size_t>(k);
      double b = 0.5 * (logs[pos - 1] + logs[pos]);
      if (!(b > prev)) throw_data("DegenerateQuantiles", "charges too concentrated to bin");
      bin.boundaries.push_back(b);
      prev = b;
    }
  }

  std::vector<std::vector<MicroCpm>> members(static_cast<size_t>(k));
  for (MicroCpm c : charges) {
    members[static_cast<size_t>(bin.class_of(c))].push_back(c);
  }
  for (auto& cls : members) {
    if (cls.empty()) throw_data("DegenerateQuantiles", "empty price class");
    std::sort(cls.begin(), cls.end());
    bin.representatives.push_back(cls[(cls.size() - 1) / 2]);
  }
  return bin;
}

namespace {

struct UaKey {
  DeviceType device;
  OsFamily os;
  Interaction interaction;
};

std::string ua_for(const UaKey& k, std::uint64_t variant) {
  if (k.interaction == Interaction::desktop_web) {
    return "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 "
           "(KHTML, like Gecko) Chrome/101.0.4951.41 Safari/537.36";
  }
  bool app = k.interaction == Interaction::app;
  if (k.os == OsFamily::android) {
    if (k.device == DeviceType::tablet) {
      return app ? "Dalvik/2.1.0 (Linux; U; Android 11; SM-T870 Tablet Build/RQ3A.210805.001)"
                 : "Mozilla/5.0 (Linux; Android 11; SM-T870 Tablet) AppleWebKit/537.36 "
                   "(KHTML, like Gecko) Chrome/100.0.4896.58 Safari/537.36";
    }
    if (app) {
      return variant % 2 == 0
                 ? "Dalvik/2.1.0 (Linux; U; Android 12; Pixel 6 Build/SD1A.210817.036)"
                 : "com.news.reader/5.2 (Linux; Android 11; SM-G991B) okhttp/4.9.3";
    }
    return "Mozilla/5.0 (Linux; Android 12; Pixel 6) AppleWebKit/537.36 "
           "(KHTML, like Gecko) Chrome/101.0.4951.41 Mobile Safari/537.36";
  }
  if (k.device == DeviceType::tablet) {
    return app ? "NewsReader/3.4 (iPad; iOS 15.4; Scale/2.00)"
               : "Mozilla/5.0 (iPad; CPU OS 15_4 like Mac OS X) AppleWebKit/605.1.15 "
                 "(KHTML, like Gecko) Version/15.4 Mobile/15E148 Safari/604.1";
  }
  if (app) {
    return variant % 2 == 0 ? "NewsReader/3.4 (iPhone; iOS 15.4; Scale/3.00)"
                            : "MusicBox/2.0 CFNetwork/1333.0.4 Darwin/21.5.0";
  }
  return "Mozilla/5.0 (iPhone; CPU iPhone OS 15_4 like Mac OS X) AppleWebKit/605.1.15 "
         "(KHTML, like Gecko) Version/15.4 Mobile/15E148 Safari/604.1";
}

// Per-hour visit weights with a daytime hump and an evening peak.
constexpr int kHourWeight[24] = {1, 1, 1, 1, 1, 1, 2, 2, 3, 4, 4, 4,
                                 4, 4, 4, 4, 4, 4, 5, 5, 5, 4, 3, 2};

int draw_hour(std::mt19937_64& g) {
  int total = 0;
  for (int w : kHourWeight) total += w;
  int r = static_cast<int>(g() % static_cast<std::uint64_t>(total));
  for (int h = 0; h < 24; ++h) {
    r -= kHourWeight[h];
    if (r < 0) return h;
  }
  return 23;
}

struct PendingRecord {
  EpochMs ts = 0;
  std::uint64_t seq = 0;
  std::string line;
};

struct UserProfile {
  std::string uid;
  std::string ip;
  std::string city;
  DeviceType device = DeviceType::smartphone;
  OsFamily os = OsFamily::android;
  bool desktop_only = false;
  int app_percent = 50;        // of mobile impressions
  std::vector<size_t> pubs;    // preferred publisher indices
};

std::string json_line(EpochMs ts, const std::string& uid, const std::string& url,
                      const std::string& ua, const std::string* referer,
                      std::int64_t bytes_out, std::int64_t bytes_in,
                      std::int64_t duration_ms, const std::string& ip) {
  ordered_json j;
  j["ts"] = ts;
  j["uid"] = uid;
  j["url"] = url;
  j["ua"] = ua;
  if (referer != nullptr) j["referer"] = *referer;
  j["bytes_out"] = bytes_out;
  j["bytes_in"] = bytes_in;
  j["duration_ms"] = duration_ms;
  j["ip"] = ip;
  return j.dump();
}

std::string sync_token(std::mt19937_64& g) {
  std::string t = "a1";
  for (int i = 0; i < 20; ++i) t.push_back(kB64[g() % 64]);
  return t;
}

const char* kSections[6] = {"news", "live", "story", "topic", "video", "local"};

}  // namespace

SimData simulate(const SimConfig& cfg) {
  if (cfg.dsps.size() < 2) throw_config("TooFewDsps", "second price needs >= 2 DSPs");
  if (cfg.adxs.empty()) throw_config("NoAdxs", "at least one exchange required");
  if (cfg.publishers.empty()) throw_config("NoPublishers", "at least one publisher required");
  if (cfg.n_users < 1) throw_config("BadSimConfig", "n_users must be >= 1");
  if (cfg.target_impressions < 1) throw_config("BadSimConfig", "target_impressions must be >= 1");
  if (cfg.duration_days < 1) throw_config("BadSimConfig", "duration_days must be >= 1");
  if (!(cfg.price_law.base_cpm > 0)) throw_config("BadSimConfig", "base_cpm must be positive");

  SimData data;
  std::vector<PendingRecord> records;
  std::vector<MicroCpm> all_charges;
  std::vector<std::pair<std::string, size_t>> token_order;  // token -> charge index
  std::vector<CoreFeatures> charge_features;
  std::vector<std::string> charge_user;
  std::vector<bool> charge_encrypted;
  std::uint64_t seq = 0;
  std::uint32_t imp_counter = 0;

  long long per_user = std::max<long long>(1, cfg.target_impressions / cfg.n_users);

  for (int ui = 0; ui < cfg.n_users; ++ui) {
    std::mt19937_64 rng(cfg.seed ^ mix64(0x55E0ULL + static_cast<std::uint64_t>(ui)));

    UserProfile u;
    char uid[16];
    std::snprintf(uid, sizeof uid, "u%04d", ui);
    u.uid = uid;
    u.desktop_only = (ui % 12 == 11);
    u.device = (ui % 4 == 3) ? DeviceType::tablet : DeviceType::smartphone;
    u.os = (ui % 5 < 2) ? OsFamily::ios : OsFamily::android;
    u.app_percent = (ui % 2 == 0) ? 75 : 35;
    std::uint64_t cr = rng() % 100;
    size_t ci = cr < 35 ? 0 : cr < 65 ? 1 : cr < 80 ? 2 : 3;
    u.city = kCities[ci];
    u.ip = "10." + std::to_string(ci + 1) + "." + std::to_string(ui / 250) + "." +
           std::to_string(ui % 250 + 1);
    std::vector<size_t> pub_idx(cfg.publishers.size());
    for (size_t i = 0; i < pub_idx.size(); ++i) pub_idx[i] = i;
    for (size_t i = pub_idx.size(); i > 1; --i) {
      std::swap(pub_idx[i - 1], pub_idx[rng() % i]);
    }
    size_t n_prefs = std::min<size_t>(4, pub_idx.size());
    u.pubs.assign(pub_idx.begin(), pub_idx.begin() + static_cast<long>(n_prefs));

    long long jitter_span = per_user / 2 + 1;
    long long n_imps = per_user + static_cast<long long>(rng() % static_cast<std::uint64_t>(jitter_span)) -
                       per_user / 4;
    if (n_imps < 1) n_imps = 1;

    for (long long imp = 0; imp < n_imps; ++imp) {
      int day = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.duration_days));
      int hour = draw_hour(rng);
      int minute = static_cast<int>(rng() % 60);
      int second = static_cast<int>(rng() % 60);
      EpochMs ts = kSimEpochMs + static_cast<EpochMs>(day) * 86400000LL +
                   static_cast<EpochMs>(hour) * 3600000LL +
                   static_cast<EpochMs>(minute) * 60000LL +
                   static_cast<EpochMs>(second) * 1000LL;

      Interaction inter;
      if (u.desktop_only) {
        inter = Interaction::desktop_web;
      } else {
        inter = (rng() % 100 < static_cast<std::uint64_t>(u.app_percent))
                    ? Interaction::app
                    : Interaction::mobile_web;
      }
      DeviceType device = u.desktop_only ? DeviceType::pc : u.device;
      OsFamily os = u.desktop_only ? OsFamily::windows : u.os;
      std::string ua = ua_for({device, os, inter}, rng());

      const SimPublisher& pub = cfg.publishers[u.pubs[rng() % u.pubs.size()]];
      std::string page_url = "http://" + pub.domain + "/" + kSections[rng() % 6] +
                             "/p" + std::to_string(rng() % 100000);

      const char* size_label;
      if (device == DeviceType::pc) {
        size_label = (rng() % 2 == 0) ? "728x90" : "300x250";
      } else if (device == DeviceType::tablet) {
        const char* opts[3] = {"728x90", "300x250", "768x1024"};
        size_label = opts[rng() % 3];
      } else {
        const char* opts[3] = {"320x50", "300x250", "320x480"};
        size_label = opts[rng() % 3];
      }

      const SimAdx& adx = cfg.adxs[rng() % cfg.adxs.size()];

      CivilTime civil = civil_from_epoch_ms(ts);
      CoreFeatures feat;
      feat.interaction = std::string(interaction_name(inter));
      feat.device_type = std::string(device_type_name(device));
      feat.os = std::string(os_name(os));
      feat.city = u.city;
      feat.tod_bucket = std::string(tod_bucket(hour));
      feat.day_of_week = std::string(weekday_name(civil.weekday));
      feat.ad_size = size_label;
      feat.publisher_iab = pub.iab;
      feat.adx_id = adx.adx_id;
      feat.hour_of_day = hour;

      double det = deterministic_cpm(cfg.price_law, feat);
      double noisy = det;
      if (cfg.price_law.noise_sigma > 0) {
        noisy = det * std::exp(cfg.price_law.noise_sigma * normal_draw(rng));
      } else {
        normal_draw(rng);  // keep the draw sequence stable across noise settings
      }
      MicroCpm charge = static_cast<MicroCpm>(std::llround(noisy * kMicrosPerCpm));
      charge = std::clamp<MicroCpm>(charge, 1, kMicroClamp);

      // Engineered runner-up: the winner overbids, the second bid equals the
      // law's charge, so the second-price rule emits exactly `charge`.
      size_t wi = rng() % cfg.dsps.size();
      size_t ri = (wi + 1 + rng() % (cfg.dsps.size() - 1)) % cfg.dsps.size();
      MicroCpm winner_bid = static_cast<MicroCpm>(
          std::llround(static_cast<double>(charge) * (1.10 + 0.25 * unit_open(rng))));
      if (winner_bid <= charge) winner_bid = charge + 1;
      std::vector<Bid> bids;
      if (rng() % 2 == 0) {
        bids = {{cfg.dsps[wi], winner_bid}, {cfg.dsps[ri], charge}};
      } else {
        MicroCpm low = std::max<MicroCpm>(1, charge / 2);
        bids = {{cfg.dsps[ri], charge}, {cfg.dsps[wi], winner_bid}, {cfg.dsps[(ri + 1) % cfg.dsps.size()], low}};
      }
      AuctionResult auction = run_auction(bids);
      charge = auction.charge;

      std::string iid = "i" + std::to_string(imp_counter);
      std::string cid = "cmp" + std::to_string(rng() % 40);
      int w = 0, h = 0;
      {
        std::string s(size_label);
        size_t x = s.find('x');
        w = std::stoi(s.substr(0, x));
        h = std::stoi(s.substr(x + 1));
      }

      std::string nurl = "http://" + adx.host;
      bool encrypted = template_encrypted(adx.tmpl);
      std::string price_text;
      if (encrypted) {
        price_text = encode_price(charge, cfg.token_key, imp_counter);
      } else {
        price_text = format_cpm(charge);
      }
      switch (adx.tmpl) {
        case NurlTemplate::clear_a:
          nurl += "/win?price=" + price_text + "&bid=" + format_cpm(winner_bid) +
                  "&size=" + std::string(size_label) + "&cur=USD&pub=" + pub.domain +
                  "&iid=" + iid;
          break;
        case NurlTemplate::clear_b:
          nurl += "/notify?charge=" + price_text + "&w=" + std::to_string(w) +
                  "&h=" + std::to_string(h) + "&cid=" + cid +
                  "&dsp=" + auction.winner_dsp + "&iid=" + iid;
          break;
        case NurlTemplate::enc_a:
          nurl += "/imp?ep=" + price_text + "&size=" + std::string(size_label) +
                  "&iid=" + iid + "&dsp=http%3A%2F%2F" + auction.winner_dsp + "%2Fcb";
          break;
        case NurlTemplate::enc_b:
          nurl += "/wp?xp=" + price_text + "&w=" + std::to_string(w) +
                  "&h=" + std::to_string(h) + "&cid=" + cid + "&pub=" + pub.domain;
          break;
      }

      EpochMs page_ts = ts - 1000 - static_cast<EpochMs>(rng() % 2000);
      records.push_back({page_ts, seq++,
                         json_line(page_ts, u.uid, page_url, ua, nullptr,
                                   600 + static_cast<std::int64_t>(rng() % 600),
                                   20000 + static_cast<std::int64_t>(rng() % 60000),
                                   300 + static_cast<std::int64_t>(rng() % 1200), u.ip)});
      if (rng() % 5 == 0) {
        EpochMs bts = page_ts + 200 + static_cast<EpochMs>(rng() % 300);
        std::string burl =
            "http://beacon.trackpix.test/pixel.gif?cb=" + std::to_string(rng() % 1000000);
        records.push_back({bts, seq++,
                           json_line(bts, u.uid, burl, ua, &page_url,
                                     180 + static_cast<std::int64_t>(rng() % 60), 43,
                                     15 + static_cast<std::int64_t>(rng() % 30), u.ip)});
      }
      if (rng() % 11 == 0) {
        std::string tok = sync_token(rng);
        EpochMs sts = page_ts + 400 + static_cast<EpochMs>(rng() % 200);
        std::string s1 = "http://sync.idmatch.test/match?suid=" + tok + "&r=1";
        std::string s2 = "http://x." + cfg.dsps[rng() % cfg.dsps.size()] +
                         "/setuid?suid=" + tok;
        records.push_back({sts, seq++,
                           json_line(sts, u.uid, s1, ua, &page_url, 200, 43, 18, u.ip)});
        records.push_back({sts + 90, seq++,
                           json_line(sts + 90, u.uid, s2, ua, &page_url, 200, 43, 18, u.ip)});
      }
      records.push_back({ts, seq++,
                         json_line(ts, u.uid, nurl, ua, &page_url,
                                   400 + static_cast<std::int64_t>(rng() % 300), 43,
                                   20 + static_cast<std::int64_t>(rng() % 80), u.ip)});

      all_charges.push_back(charge);
      charge_features.push_back(feat);
      charge_user.push_back(u.uid);
      charge_encrypted.push_back(encrypted);
      if (encrypted) {
        token_order.emplace_back(price_text, all_charges.size() - 1);
        data.user_truth[u.uid].encrypted_micro += charge;
      } else {
        data.user_truth[u.uid].cleartext_micro += charge;
      }

      ordered_json contrib;
      contrib["features"] = features_to_json(feat);
      contrib["price"] = format_cpm(charge);
      contrib["submitted_at"] = ts / 1000;
      data.contributions.push_back(contrib.dump());

      ++imp_counter;
    }
  }

  data.n_impressions = all_charges.size();
  data.reference_binning = reference_binning_from_charges(all_charges, 4);
  for (const auto& [token, idx] : token_order) {
    SealedToken st;
    st.cpm = all_charges[idx];
    st.cls = data.reference_binning.class_of(st.cpm);
    st.features = charge_features[idx];
    data.tokens.emplace(token, std::move(st));
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const PendingRecord& a, const PendingRecord& b) {
                     return a.ts < b.ts;
                   });
  data.weblog.reserve(records.size());
  for (auto& r : records) data.weblog.push_back(std::move(r.line));
  return data;
}

std::string sim_macro_rules_json(const SimConfig& cfg) {
  ordered_json doc;
  doc["schema_version"] = 1;
  ordered_json rules = ordered_json::array();
  for (const auto& adx : cfg.adxs) {
    ordered_json r;
    r["adx_id"] = adx.adx_id;
    r["host_pattern"] = adx.host;
    ordered_json prices = ordered_json::array();
    ordered_json meta;
    switch (adx.tmpl) {
      case NurlTemplate::clear_a:
        prices.push_back({{"name", "price"}, {"tag", "charge"}});
        prices.push_back({{"name", "bid"}, {"tag", "bid"}});
        meta["size"] = "ad_size";
        meta["cur"] = "currency";
        meta["pub"] = "publisher";
        meta["iid"] = "impression_id";
        break;
      case NurlTemplate::clear_b:
        prices.push_back({{"name", "charge"}, {"tag", "charge"}});
        meta["w"] = "ad_width";
        meta["h"] = "ad_height";
        meta["cid"] = "campaign_id";
        meta["dsp"] = "dsp_domain";
        meta["iid"] = "impression_id";
        break;
      case NurlTemplate::enc_a:
        prices.push_back({{"name", "ep"}, {"tag", "charge"}});
        meta["size"] = "ad_size";
        meta["iid"] = "impression_id";
        meta["dsp"] = "dsp_domain";
        break;
      case NurlTemplate::enc_b:
        prices.push_back({{"name", "xp"}, {"tag", "charge"}});
        meta["w"] = "ad_width";
        meta["h"] = "ad_height";
        meta["cid"] = "campaign_id";
        meta["pub"] = "publisher";
        break;
    }
    r["price_params"] = prices;
    r["metadata_params"] = meta;
    rules.push_back(r);
  }

  ordered_json mopub;
  mopub["adx_id"] = "mopub";
  mopub["host_pattern"] = "mpx.mopub.com";
  mopub["price_params"] = {{{"name", "charge_price"}, {"tag", "charge"}},
                           {{"name", "bid_price"}, {"tag", "bid"}}};
  mopub["metadata_params"] = {{"currency", "currency"},
                              {"bidder_name", "bidder_name"},
                              {"pub_name", "publisher"},
                              {"mopub_id", "impression_id"}};
  rules.push_back(mopub);

  ordered_json mathtag;
  mathtag["adx_id"] = "rubicon";
  mathtag["host_pattern"] = "tags.mathtag.com";
  mathtag["price_params"] = {{{"name", "price"}, {"tag", "charge"}}};
  mathtag["host_is_dsp"] = true;
  rules.push_back(mathtag);

  ordered_json mythings;
  mythings["adx_id"] = "doubleclick";
  mythings["host_pattern"] = "mythings.com";
  mythings["price_params"] = {{{"name", "rtbwinprice"}, {"tag", "charge"}},
                              {{"name", "mcpm"}, {"tag", "bid"}}};
  mythings["metadata_params"] = {{"width", "ad_width"},
                                 {"height", "ad_height"},
                                 {"cmpid", "campaign_id"}};
  mythings["host_is_dsp"] = true;
  rules.push_back(mythings);

  doc["rules"] = rules;
  return doc.dump(2) + "\n";
}

void write_bundle(const SimData& data, const SimConfig& cfg,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw_data("WriteFailed", std::string("cannot write ") + name);
    return f;
  };

  {
    auto f = open("weblog.jsonl");
    for (const auto& line : data.weblog) f << line << '\n';
  }
  {
    auto f = open("contributions.jsonl");
    for (const auto& line : data.contributions) f << line << '\n';
  }
  {
    ordered_json ledger;
    ledger["schema_version"] = 1;
    ledger["seed"] = cfg.seed;
    ledger["n_impressions"] = data.n_impressions;
    ordered_json bj;
    bj["k"] = data.reference_binning.k;
    bj["boundaries"] = data.reference_binning.boundaries;
    ordered_json reps = ordered_json::array();
    for (MicroCpm r : data.reference_binning.representatives) reps.push_back(format_cpm(r));
    bj["representatives"] = reps;
    ledger["binning"] = bj;
    ordered_json tokens;
    for (const auto& [token, st] : data.tokens) {
      ordered_json tj;
      tj["cpm"] = format_cpm(st.cpm);
      tj["class"] = st.cls;
      tj["features"] = features_to_json(st.features);
      tokens[token] = tj;
    }
    ledger["tokens"] = tokens;
    ordered_json users;
    for (const auto& [uid, truth] : data.user_truth) {
      ordered_json uj;
      uj["cleartext"] = format_cpm(truth.cleartext_micro);
      uj["encrypted"] = format_cpm(truth.encrypted_micro);
      users[uid] = uj;
    }
    ledger["users"] = users;
    open("sealed_ledger.json") << ledger.dump(2) << '\n';
  }
  open("macro_rules.json") << sim_macro_rules_json(cfg);
  {
    auto f = open("blacklist.csv");
    f << "domain,category\n";
    for (const auto& adx : cfg.adxs) {
      f << registrable_domain(adx.host) << ",Advertising\n";
    }
    f << "idmatch.test,Advertising\n";
    f << "mopub.com,Advertising\n";
    f << "mathtag.com,Advertising\n";
    f << "mythings.com,Advertising\n";
    f << "trackpix.test,Analytics\n";
  }
  {
    auto f = open("geo.csv");
    f << "cidr,city\n";
    for (size_t i = 0; i < 4; ++i) {
      f << "10." << (i + 1) << ".0.0/16," << kCities[i] << "\n";
    }
  }
  {
    auto f = open("iab_map.csv");
    f << "domain,iab_code\n";
    for (const auto& p : cfg.publishers) f << p.domain << "," << p.iab << "\n";
  }
  {
    ordered_json c;
    c["paths"] = {{"blacklist", "blacklist.csv"},
                  {"geo", "geo.csv"},
                  {"iab_map", "iab_map.csv"},
                  {"macro_rules", "macro_rules.json"}};
    c["binning"] = {{"k", 4}};
    c["forest"] = {{"n_trees", 100}, {"min_leaf", 5}};
    c["seed"] = cfg.seed;
    open("config.json") << c.dump(2) << '\n';
  }
}

}  // namespace adcost
