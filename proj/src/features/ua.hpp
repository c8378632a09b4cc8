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

#include <string_view>

namespace adcost {

enum class DeviceType { smartphone, tablet, pc };
enum class OsFamily { android, ios, windows, other };
enum class Interaction { app, mobile_web, desktop_web };

std::string_view device_type_name(DeviceType d);
std::string_view os_name(OsFamily o);
std::string_view interaction_name(Interaction i);

struct DeviceProfile {
  DeviceType device_type = DeviceType::pc;
  OsFamily os = OsFamily::other;
  Interaction interaction = Interaction::desktop_web;

  bool operator==(const DeviceProfile&) const = default;
};

// Deterministic rule table; unmatched input falls back to
// (pc, other, desktop_web). interaction=app is only ever produced on
// mobile device types.
DeviceProfile parse_user_agent(std::string_view ua);

}  // namespace adcost
