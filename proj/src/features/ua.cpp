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

#include "features/ua.hpp"

#include "common/url.hpp"

namespace adcost {
namespace {

bool contains(std::string_view hay, std::string_view needle) {
  return hay.find(needle) != std::string_view::npos;
}

}  // namespace

std::string_view device_type_name(DeviceType d) {
  switch (d) {
    case DeviceType::smartphone: return "smartphone";
    case DeviceType::tablet: return "tablet";
    case DeviceType::pc: return "pc";
  }
  return "pc";
}

std::string_view os_name(OsFamily o) {
  switch (o) {
    case OsFamily::android: return "android";
    case OsFamily::ios: return "ios";
    case OsFamily::windows: return "windows";
    case OsFamily::other: return "other";
  }
  return "other";
}

std::string_view interaction_name(Interaction i) {
  switch (i) {
    case Interaction::app: return "app";
    case Interaction::mobile_web: return "mobile_web";
    case Interaction::desktop_web: return "desktop_web";
  }
  return "desktop_web";
}

DeviceProfile parse_user_agent(std::string_view ua) {
  DeviceProfile p;
  if (ua.empty()) return p;
  std::string low = to_lower(ua);

  const bool browser = contains(low, "mozilla") || contains(low, "opera");
  // Process-VM and HTTP-stack tokens mark in-app requests.
  const bool app_stack = contains(low, "dalvik") || contains(low, "okhttp") ||
                         contains(low, "cfnetwork") || contains(low, "darwin/") ||
                         contains(low, "com.") || contains(low, "wv)");

  if (contains(low, "windows phone")) {
    p.os = OsFamily::windows;
    p.device_type = DeviceType::smartphone;
  } else if (contains(low, "android")) {
    p.os = OsFamily::android;
    // Chrome on Android tablets omits the "Mobile" token.
    if (contains(low, "tablet") || (browser && !contains(low, "mobile")))
      p.device_type = DeviceType::tablet;
    else
      p.device_type = DeviceType::smartphone;
  } else if (contains(low, "ipad")) {
    p.os = OsFamily::ios;
    p.device_type = DeviceType::tablet;
  } else if (contains(low, "iphone") || contains(low, "ipod")) {
    p.os = OsFamily::ios;
    p.device_type = DeviceType::smartphone;
  } else if (contains(low, "cfnetwork") || contains(low, "darwin/")) {
    p.os = OsFamily::ios;
    p.device_type = DeviceType::smartphone;
  } else if (contains(low, "windows nt")) {
    p.os = OsFamily::windows;
    p.device_type = DeviceType::pc;
  } else {
    p.os = OsFamily::other;
    p.device_type = DeviceType::pc;
  }

  if (p.device_type == DeviceType::pc) {
    p.interaction = Interaction::desktop_web;
  } else if (app_stack || !browser) {
    p.interaction = Interaction::app;
  } else {
    p.interaction = Interaction::mobile_web;
  }
  return p;
}

}  // namespace adcost
