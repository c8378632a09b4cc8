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

#include <fstream>
#include <memory>
#include <string>
#include <string_view>

#include <zlib.h>

namespace adcost {

// Reads plain or gzip-compressed text line by line. Compression is
// selected by the ".gz" filename suffix.
class LineReader {
 public:
  explicit LineReader(const std::string& path);
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;
  ~LineReader();

  // Returns false at end of input. Strips trailing '\n' and '\r'.
  bool next(std::string& line);

  bool ok() const { return ok_; }

 private:
  bool gz_ = false;
  bool ok_ = false;
  gzFile gzf_ = nullptr;
  std::ifstream in_;
  std::string buf_;
};

bool has_suffix(std::string_view s, std::string_view suffix);

}  // namespace adcost
