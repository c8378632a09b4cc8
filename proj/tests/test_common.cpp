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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <zlib.h>

#include "common/csv.hpp"
#include "common/lines.hpp"
#include "common/money.hpp"
#include "common/net.hpp"
#include "common/timeutil.hpp"
#include "common/url.hpp"

using namespace adcost;

TEST_CASE("parse_cpm accepts plain decimals") {
  CHECK(parse_cpm("0.95") == MicroCpm{950000});
  CHECK(parse_cpm("12") == MicroCpm{12000000});
  CHECK(parse_cpm(".5") == MicroCpm{500000});
  CHECK(parse_cpm("0.123456") == MicroCpm{123456});
  CHECK(parse_cpm("0") == MicroCpm{0});
  CHECK(parse_cpm("60") == MicroCpm{60000000});
}

TEST_CASE("parse_cpm rounds digits beyond micro half away from zero") {
  CHECK(parse_cpm("0.1234565") == MicroCpm{123457});
  CHECK(parse_cpm("0.1234564") == MicroCpm{123456});
  CHECK(parse_cpm("0.0000001") == MicroCpm{0});
  CHECK(parse_cpm("0.0000005") == MicroCpm{1});
}

TEST_CASE("parse_cpm rejects malformed numbers") {
  CHECK_FALSE(parse_cpm(""));
  CHECK_FALSE(parse_cpm("-1"));
  CHECK_FALSE(parse_cpm("+1"));
  CHECK_FALSE(parse_cpm("1e3"));
  CHECK_FALSE(parse_cpm("1.2.3"));
  CHECK_FALSE(parse_cpm("abc"));
  CHECK_FALSE(parse_cpm("1 "));
  CHECK_FALSE(parse_cpm(" 1"));
  CHECK_FALSE(parse_cpm("."));
}

TEST_CASE("format_cpm renders shortest exact decimal") {
  CHECK(format_cpm(950000) == "0.95");
  CHECK(format_cpm(12000000) == "12");
  CHECK(format_cpm(1) == "0.000001");
  CHECK(format_cpm(1500000) == "1.5");
  CHECK(format_cpm(0) == "0");
  CHECK(format_cpm(210357379) == "210.357379");
}

TEST_CASE("format_cpm and parse_cpm round-trip random amounts") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    MicroCpm micros = static_cast<MicroCpm>(rng() % 10'000'000'000ULL);
    auto back = parse_cpm(format_cpm(micros));
    REQUIRE(back);
    CHECK(*back == micros);
  }
}

TEST_CASE("cpm_from_double matches integer micros on grid values") {
  CHECK(cpm_from_double(0.95) == MicroCpm{950000});
  CHECK(cpm_from_double(16.0) == MicroCpm{16000000});
  CHECK(cpm_to_double(950000) == doctest::Approx(0.95));
}

TEST_CASE("civil_from_epoch_ms derives known UTC dates") {
  // 2015-05-15 is a Friday.
  CivilTime t = civil_from_epoch_ms(1431648000000);
  CHECK(t.year == 2015);
  CHECK(t.month == 5);
  CHECK(t.day == 15);
  CHECK(t.hour == 0);
  CHECK(t.minute == 0);
  CHECK(t.second == 0);
  CHECK(t.weekday == 4);
  CHECK_FALSE(is_weekend(t));

  // Unix epoch is a Thursday.
  CivilTime epoch = civil_from_epoch_ms(0);
  CHECK(epoch.year == 1970);
  CHECK(epoch.weekday == 3);

  // Leap day.
  CivilTime leap = civil_from_epoch_ms(epoch_ms_from_civil(2024, 2, 29, 12, 30, 45));
  CHECK(leap.month == 2);
  CHECK(leap.day == 29);
  CHECK(leap.hour == 12);
  CHECK(leap.weekday == 3);
}

TEST_CASE("epoch and civil conversions are inverse on random times") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    EpochMs ms = static_cast<EpochMs>(rng() % 4'000'000'000'000LL);
    ms -= ms % 1000;  // civil time carries whole seconds
    CivilTime t = civil_from_epoch_ms(ms);
    CHECK(epoch_ms_from_civil(t.year, t.month, t.day, t.hour, t.minute,
                              t.second) == ms);
  }
}

TEST_CASE("rfc3339 parses offsets and milliseconds") {
  CHECK(parse_rfc3339("2015-05-15T00:00:00Z") == EpochMs{1431648000000});
  CHECK(parse_rfc3339("2015-05-15T00:00:00.779Z") == EpochMs{1431648000779});
  CHECK(parse_rfc3339("2015-05-15T02:00:00+02:00") == EpochMs{1431648000000});
  CHECK(parse_rfc3339("2015-05-14T22:00:00-02:00") == EpochMs{1431648000000});
  CHECK_FALSE(parse_rfc3339("2015-05-15"));
  CHECK_FALSE(parse_rfc3339("not a time"));
  CHECK(format_rfc3339(1431648000779) == "2015-05-15T00:00:00.779Z");
  CHECK(parse_rfc3339(format_rfc3339(1431648000779)) == EpochMs{1431648000779});
}

TEST_CASE("tod buckets split the day at 9 and 18") {
  CHECK(tod_bucket(0) == "12am-9am");
  CHECK(tod_bucket(8) == "12am-9am");
  CHECK(tod_bucket(9) == "9am-6pm");
  CHECK(tod_bucket(17) == "9am-6pm");
  CHECK(tod_bucket(18) == "6pm-12am");
  CHECK(tod_bucket(23) == "6pm-12am");
}

TEST_CASE("weekday names and weekend flag") {
  CHECK(weekday_name(0) == "mon");
  CHECK(weekday_name(4) == "fri");
  CHECK(weekday_name(5) == "sat");
  CHECK(weekday_name(6) == "sun");
  CivilTime sat = civil_from_epoch_ms(epoch_ms_from_civil(2015, 5, 16, 0, 0, 0));
  CHECK(sat.weekday == 5);
  CHECK(is_weekend(sat));
}

TEST_CASE("parse_url splits scheme host port path and params") {
  auto u = parse_url("http://Imp.ClearBid.test:8080/win?price=0.95&b=%20x&c=a+b#frag");
  REQUIRE(u);
  CHECK(u->scheme == "http");
  CHECK(u->host == "imp.clearbid.test");
  CHECK(u->port == 8080);
  CHECK(u->path == "/win");
  REQUIRE(u->params.size() == 3);
  CHECK(u->params[0].first == "price");
  CHECK(u->params[0].second == "0.95");
  CHECK(u->params[1].second == " x");   // decoded once
  CHECK(u->params[2].second == "a+b");  // plus stays plus
  CHECK_FALSE(parse_url("notaurl"));
}

TEST_CASE("find_param returns first match by key") {
  auto u = parse_url("https://x.test/p?a=1&b=2&a=3");
  REQUIRE(u);
  const std::string* a = find_param(*u, "a");
  REQUIRE(a);
  CHECK(*a == "1");
  CHECK(find_param(*u, "zz") == nullptr);
}

TEST_CASE("host suffix matching is label-aligned") {
  CHECK(host_matches_suffix("imp.clearbid.test", "clearbid.test"));
  CHECK(host_matches_suffix("clearbid.test", "clearbid.test"));
  CHECK_FALSE(host_matches_suffix("notclearbid.test", "clearbid.test"));
  CHECK_FALSE(host_matches_suffix("clearbid.test.evil", "clearbid.test"));
}

TEST_CASE("registrable_domain keeps the last two labels") {
  CHECK(registrable_domain("x.dsp-alpha.test") == "dsp-alpha.test");
  CHECK(registrable_domain("a.b.example.com") == "example.com");
  CHECK(registrable_domain("mopub.com") == "mopub.com");
  CHECK(registrable_domain("localhost") == "localhost");
}

TEST_CASE("csv split handles quotes and embedded separators") {
  auto fields = split_csv_line("a,\"b,c\",\"d\"\"e\",f");
  REQUIRE(fields.size() == 4);
  CHECK(fields[0] == "a");
  CHECK(fields[1] == "b,c");
  CHECK(fields[2] == "d\"e");
  CHECK(fields[3] == "f");
}

TEST_CASE("csv join and split round-trip") {
  std::vector<std::string> row{"plain", "with,comma", "with\"quote", ""};
  auto back = split_csv_line(join_csv(row));
  CHECK(back == row);
}

TEST_CASE("parse_ip reads v4 and v6") {
  auto v4 = parse_ip("10.1.0.7");
  REQUIRE(v4);
  CHECK(v4->v4);
  auto v6 = parse_ip("2001:db8::1");
  REQUIRE(v6);
  CHECK_FALSE(v6->v4);
  CHECK_FALSE(parse_ip("999.1.2.3"));
  CHECK_FALSE(parse_ip("banana"));
}

TEST_CASE("ip_in_prefix matches CIDR blocks") {
  auto addr = parse_ip("10.1.7.9");
  auto net16 = parse_ip("10.1.0.0");
  auto net24 = parse_ip("10.1.8.0");
  REQUIRE((addr && net16 && net24));
  CHECK(ip_in_prefix(*addr, *net16, 16));
  CHECK_FALSE(ip_in_prefix(*addr, *net24, 24));
}

TEST_CASE("LineReader reads plain files and reports missing ones") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "adcost_test_lines";
  fs::create_directories(dir);
  fs::path plain = dir / "plain.txt";
  {
    std::ofstream out(plain);
    out << "one\ntwo\nthree";
  }
  LineReader reader(plain.string());
  REQUIRE(reader.ok());
  std::string line;
  std::vector<std::string> lines;
  while (reader.next(line))
    lines.push_back(line);
  CHECK(lines == std::vector<std::string>{"one", "two", "three"});

  LineReader missing((dir / "nope.txt").string());
  CHECK_FALSE(missing.ok());
}

TEST_CASE("LineReader inflates gz files by suffix") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "adcost_test_lines";
  fs::create_directories(dir);
  fs::path gz = dir / "log.jsonl.gz";
  gzFile f = gzopen(gz.string().c_str(), "wb");
  REQUIRE(f != nullptr);
  gzputs(f, "alpha\nbeta\n");
  gzclose(f);

  LineReader reader(gz.string());
  REQUIRE(reader.ok());
  std::string line;
  REQUIRE(reader.next(line));
  CHECK(line == "alpha");
  REQUIRE(reader.next(line));
  CHECK(line == "beta");
  CHECK_FALSE(reader.next(line));
  CHECK(has_suffix("x.gz", ".gz"));
  CHECK_FALSE(has_suffix("x.gzip", ".gz"));
}
