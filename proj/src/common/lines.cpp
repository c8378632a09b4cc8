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

#include "common/lines.hpp"

namespace adcost {

bool has_suffix(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

LineReader::LineReader(const std::string& path) {
  gz_ = has_suffix(path, ".gz");
  if (gz_) {
    gzf_ = gzopen(path.c_str(), "rb");
    ok_ = gzf_ != nullptr;
  } else {
    in_.open(path, std::ios::in | std::ios::binary);
    ok_ = in_.is_open();
  }
}

LineReader::~LineReader() {
  if (gzf_) gzclose(gzf_);
}

bool LineReader::next(std::string& line) {
  if (!ok_) return false;
  if (gz_) {
    line.clear();
    char chunk[4096];
    bool got = false;
    while (gzgets(gzf_, chunk, sizeof(chunk)) != nullptr) {
      got = true;
      line += chunk;
      if (!line.empty() && line.back() == '\n') break;
    }
    if (!got) return false;
  } else {
    if (!std::getline(in_, line)) return false;
  }
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
  return true;
}

}  // namespace adcost
