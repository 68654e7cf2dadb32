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

#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "trustware/types.hpp"

namespace trustware::sim {

enum class DeviceBehavior { Honest, Silent };

std::string_view to_string(DeviceBehavior behavior);

/// A Trustware device holding its three factory values. `scope` stands in
/// for radio range: only listeners in the same scope hear it.
struct EmulatedDevice {
  DeviceId device_id;
  DeviceSecret secret;
  std::string manufacturer_url;
  std::int64_t clock_offset_s = 0;
  DeviceBehavior behavior = DeviceBehavior::Honest;
  std::string scope;
};

/// (device_id, totp at the device's own clock, manufacturer_url). Throws
/// InvalidArgument for silent devices.
Advertisement advertise(const EmulatedDevice& device, UnixSeconds now);

/// Reads `device_id,secret,manufacturer_url,clock_offset_s,behavior,scope`
/// lines. Throws ConfigInvalid.
std::vector<EmulatedDevice> parse_roster(std::istream& in);
std::string format_roster(const std::vector<EmulatedDevice>& devices);

/// In-memory broadcast of encoded advertisements, partitioned by scope.
/// Delivery is synchronous and in subscription order.
class AdvertisementBus {
 public:
  using Listener = std::function<void(const std::string& encoded)>;
  using SubscriptionId = std::uint64_t;

  SubscriptionId subscribe(const std::string& scope, Listener listener);
  void unsubscribe(SubscriptionId id);

  /// Returns the number of listeners reached.
  std::size_t publish(const std::string& scope, const std::string& encoded);

 private:
  struct Subscription {
    SubscriptionId id;
    std::string scope;
    Listener listener;
  };
  SubscriptionId next_id_ = 1;
  std::vector<Subscription> subscriptions_;
};

}  // namespace trustware::sim
