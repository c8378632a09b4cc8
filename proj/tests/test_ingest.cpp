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

#include <filesystem>
#include <fstream>

#include "common/error.hpp"
#include "ingest/ingest.hpp"

using namespace adcost;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "adcost_test_ingest";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  return p.string();
}

}  // namespace

TEST_CASE("parse_record reads the JSONL field set") {
  ParseCounters c;
  auto rec = parse_record(
      R"({"ts":1431648097000,"uid":"u0001","url":"http://a.test/x",)"
      R"("ua":"UA","referer":"http://r.test/p","bytes_out":10,"bytes_in":20,)"
      R"("duration_ms":30,"ip":"10.0.0.1","city":"Madrid"})",
      LogFormat::json_lines, c);
  REQUIRE(rec);
  CHECK(rec->timestamp == 1431648097000);
  CHECK(rec->user_id == "u0001");
  CHECK(rec->url == "http://a.test/x");
  CHECK(rec->user_agent == "UA");
  CHECK(rec->referer == "http://r.test/p");
  CHECK(rec->bytes_out == 10);
  CHECK(rec->bytes_in == 20);
  CHECK(rec->duration_ms == 30);
  CHECK(rec->client_ip == "10.0.0.1");
  CHECK(rec->city == "Madrid");
  CHECK(c.parsed == 1);
  CHECK(c.skipped == 0);
}

TEST_CASE("parse_record skips malformed lines and keeps the line count") {
  ParseCounters c;
  std::vector<std::string> lines{
      R"({"ts":1,"uid":"u1","url":"http://a.test/"})",
      "not json",
      R"({"uid":"u1","url":"http://a.test/"})",       // ts missing
      R"({"ts":2,"url":"http://a.test/"})",           // uid missing
      R"({"ts":3,"uid":"","url":"http://a.test/"})",  // uid empty
      R"([1,2,3])",
      R"({"ts":4,"uid":"u1","url":"http://b.test/"})",
  };
  size_t parsed = 0;
  for (const auto& line : lines)
    if (parse_record(line, LogFormat::json_lines, c))
      ++parsed;
  CHECK(parsed == 2);
  CHECK(c.parsed == 2);
  CHECK(c.skipped == 5);
  CHECK(c.parsed + c.skipped == lines.size());
}

TEST_CASE("parse_record accepts RFC 3339 timestamps") {
  ParseCounters c;
  auto rec = parse_record(
      R"({"ts":"2015-05-15T00:00:00Z","uid":"u1","url":"http://a.test/"})",
      LogFormat::json_lines, c);
  REQUIRE(rec);
  CHECK(rec->timestamp == 1431648000000);
}

TEST_CASE("parse_record drops bad optional fields without losing the record") {
  ParseCounters c;
  auto rec = parse_record(
      R"({"ts":5,"uid":"u1","url":"http://a.test/","bytes_out":-3,"ip":17})",
      LogFormat::json_lines, c);
  REQUIRE(rec);
  CHECK(rec->bytes_out == 0);
  CHECK_FALSE(rec->client_ip);
  CHECK(c.optional_dropped == 2);
}

TEST_CASE("csv records parse through a bound header") {
  ParseCounters c;
  CsvHeader header = parse_csv_header("ts,uid,url,ua,bytes_in");
  auto rec = parse_csv_record("1000,u9,http://a.test/p,AgentX,44", header, c);
  REQUIRE(rec);
  CHECK(rec->timestamp == 1000);
  CHECK(rec->user_id == "u9");
  CHECK(rec->user_agent == "AgentX");
  CHECK(rec->bytes_in == 44);
  CHECK_FALSE(parse_csv_record("only,three,cols", header, c));
  CHECK(c.parsed == 1);
  CHECK(c.skipped == 1);
}

TEST_CASE("parse_record refuses csv without a header") {
  ParseCounters c;
  CHECK_THROWS_AS(parse_record("a,b,c", LogFormat::csv, c), Error);
}

TEST_CASE("blacklist classifies by longest matching suffix") {
  Blacklist bl;
  bl.add("clearbid.test", DomainCategory::Advertising);
  bl.add("trackpix.test", DomainCategory::Analytics);
  bl.add("social.test", DomainCategory::Social);
  bl.add("cdn.pages.test", DomainCategory::ThirdPartyContent);

  CHECK(bl.classify("imp.clearbid.test") == DomainCategory::Advertising);
  CHECK(bl.classify("clearbid.test") == DomainCategory::Advertising);
  CHECK(bl.classify("beacon.trackpix.test") == DomainCategory::Analytics);
  CHECK(bl.classify("a.cdn.pages.test") == DomainCategory::ThirdPartyContent);
  CHECK(bl.classify("pages.test") == DomainCategory::Rest);
  CHECK(bl.classify("news.example") == DomainCategory::Rest);
  CHECK(bl.classify("notclearbid.test") == DomainCategory::Rest);
}

TEST_CASE("blacklist rejects duplicates and unknown categories") {
  Blacklist bl;
  bl.add("x.test", DomainCategory::Advertising);
  CHECK_THROWS_AS(bl.add("x.test", DomainCategory::Analytics), Error);
  CHECK_FALSE(category_from_name("Junk"));
  CHECK(category_from_name("Advertising") == DomainCategory::Advertising);
  CHECK(category_name(DomainCategory::ThirdPartyContent) == "ThirdPartyContent");
}

TEST_CASE("blacklist loads csv with and without header") {
  std::string with_header = write_temp(
      "bl1.csv", "domain,category\nads.test,Advertising\nstats.test,Analytics\n");
  Blacklist bl = Blacklist::load_csv(with_header);
  CHECK(bl.size() == 2);
  CHECK(bl.classify("x.ads.test") == DomainCategory::Advertising);

  std::string bare =
      write_temp("bl2.csv", "ads.test,Advertising\nstats.test,Analytics\n");
  Blacklist bl2 = Blacklist::load_csv(bare);
  CHECK(bl2.size() == 2);

  std::string bad = write_temp("bl3.csv", "ads.test,NotACategory\n");
  CHECK_THROWS_AS(Blacklist::load_csv(bad), Error);
}

TEST_CASE("partition_by_user keeps per-user time order") {
  std::vector<HttpRequestRecord> records;
  auto rec = [](std::string uid, EpochMs ts) {
    HttpRequestRecord r;
    r.user_id = std::move(uid);
    r.timestamp = ts;
    r.url = "http://a.test/";
    return r;
  };
  records.push_back(rec("u1", 5));
  records.push_back(rec("u2", 1));
  records.push_back(rec("u1", 2));
  records.push_back(rec("u1", 5));
  records.push_back(rec("u2", 9));

  auto parts = partition_by_user(std::move(records));
  REQUIRE(parts.size() == 2);
  REQUIRE(parts["u1"].size() == 3);
  CHECK(parts["u1"][0].timestamp == 2);
  CHECK(parts["u1"][1].timestamp == 5);
  CHECK(parts["u1"][2].timestamp == 5);
  CHECK(parts["u2"][0].timestamp == 1);
  CHECK(parts["u2"][1].timestamp == 9);
}

TEST_CASE("record_host extracts the URL host") {
  HttpRequestRecord r;
  r.url = "https://Sub.Host.test/path?q=1";
  CHECK(record_host(r) == "sub.host.test");
  r.url = "garbage";
  CHECK(record_host(r).empty());
}

TEST_CASE("classify_domain wraps blacklist lookup") {
  Blacklist bl;
  bl.add("ads.test", DomainCategory::Advertising);
  CHECK(classify_domain("x.ads.test", bl) == DomainCategory::Advertising);
  CHECK(classify_domain("other.test", bl) == DomainCategory::Rest);
}
