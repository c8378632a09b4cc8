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

#include <stdexcept>
#include <string>
#include <utility>

namespace adcost {

// Coarse failure class. Config maps to CLI exit 2, Data to exit 1.
enum class ErrorKind { Config, Data, Usage };

// All recoverable failures carry a stable machine-readable code
// ("MalformedRecord", "VersionMismatch", ...) that tests match on.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message),
        kind_(kind),
        code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void throw_config(std::string code, const std::string& msg) {
  throw Error(ErrorKind::Config, std::move(code), msg);
}

[[noreturn]] inline void throw_data(std::string code, const std::string& msg) {
  throw Error(ErrorKind::Data, std::move(code), msg);
}

[[noreturn]] inline void throw_usage(std::string code, const std::string& msg) {
  throw Error(ErrorKind::Usage, std::move(code), msg);
}

}  // namespace adcost
