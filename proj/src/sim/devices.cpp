// Copyright 2026 The Trustware Authors
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

#include "trustware/sim/devices.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "trustware/otp.hpp"

namespace trustware::sim {

std::string_view to_string(DeviceBehavior behavior) {
  return behavior == DeviceBehavior::Honest ? "honest" : "silent";
}

Advertisement advertise(const EmulatedDevice& device, UnixSeconds now) {
  if (device.behavior != DeviceBehavior::Honest) {
    throw Error(Errc::InvalidArgument, "silent device " + device.device_id.str() + " does not advertise");
  }
  const auto local = now + device.clock_offset_s;
  return {device.device_id, totp(device.secret, interval_index(local)), device.manufacturer_url};
}

std::vector<EmulatedDevice> parse_roster(std::istream& in) {
  std::vector<EmulatedDevice> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    auto fail = [&](const std::string& why) {
      throw Error(Errc::ConfigInvalid, "roster line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 6) fail("expected 6 comma-separated fields");

    auto id = DeviceId::try_parse(fields[0]);
    if (!id) fail("bad device_id");
    auto secret = DeviceSecret::try_parse(fields[1]);
    if (!secret) fail("bad secret");
    if (fields[2].empty()) fail("empty manufacturer_url");
    std::int64_t offset = 0;
    const auto& o = fields[3];
    auto [ptr, ec] = std::from_chars(o.data(), o.data() + o.size(), offset);
    if (ec != std::errc{} || ptr != o.data() + o.size()) fail("bad clock_offset_s");
    DeviceBehavior behavior;
    if (fields[4] == "honest") {
      behavior = DeviceBehavior::Honest;
    } else if (fields[4] == "silent") {
      behavior = DeviceBehavior::Silent;
    } else {
      fail("behavior must be honest or silent");
    }
    if (fields[5].empty()) fail("empty scope");
    out.push_back({*id, *secret, fields[2], offset, behavior, fields[5]});
  }
  return out;
}

std::string format_roster(const std::vector<EmulatedDevice>& devices) {
  std::ostringstream out;
  for (const auto& d : devices) {
    out << d.device_id.str() << ',' << d.secret.str() << ',' << d.manufacturer_url << ','
        << d.clock_offset_s << ',' << to_string(d.behavior) << ',' << d.scope << '\n';
  }
  return out.str();
}

AdvertisementBus::SubscriptionId AdvertisementBus::subscribe(const std::string& scope,
                                                             Listener listener) {
  const auto id = next_id_++;
  subscriptions_.push_back({id, scope, std::move(listener)});
  return id;
}

void AdvertisementBus::unsubscribe(SubscriptionId id) {
  std::erase_if(subscriptions_, [id](const Subscription& s) { return s.id == id; });
}

std::size_t AdvertisementBus::publish(const std::string& scope, const std::string& encoded) {
  // Listeners may (un)subscribe while we deliver; iterate over a snapshot.
  std::vector<std::pair<SubscriptionId, Listener>> targets;
  for (const auto& s : subscriptions_) {
    if (s.scope == scope) targets.emplace_back(s.id, s.listener);
  }
  std::size_t reached = 0;
  for (const auto& [id, listener] : targets) {
    const bool still_subscribed = std::any_of(subscriptions_.begin(), subscriptions_.end(),
                                              [id = id](const Subscription& s) { return s.id == id; });
    if (!still_subscribed) continue;
    listener(encoded);
    ++reached;
  }
  return reached;
}

}  // namespace trustware::sim
