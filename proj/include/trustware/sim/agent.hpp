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

#include <map>
#include <optional>
#include <string>

#include "trustware/sim/devices.hpp"
#include "trustware/sim/protocol_client.hpp"

namespace trustware::sim {

/// Relayed: manufacturer answers the client, which forwards the voucher.
/// Direct: the manufacturer posts the voucher to the relying party itself.
enum class DeliveryMode { Relayed, Direct };

std::string_view to_string(DeliveryMode mode);
std::optional<DeliveryMode> parse_delivery_mode(std::string_view text);

/// The browser-side coordinator. Opens a session, listens to its scope, and
/// sends one verification request per device heard. A device is retried only
/// after a refusal and only once it advertises a different code.
class ClientAgent {
 public:
  ClientAgent(std::string name, std::string scope, std::string rp_url, DeliveryMode mode,
              Endpoint endpoint, AdvertisementBus& bus, const Clock& clock);
  ~ClientAgent();
  ClientAgent(const ClientAgent&) = delete;
  ClientAgent& operator=(const ClientAgent&) = delete;

  /// Opens the session and starts harvesting. nullopt if the relying party
  /// is unreachable.
  std::optional<SessionOffer> start();
  void stop();

  const std::string& name() const { return name_; }
  const std::string& actor() const { return actor_; }
  const std::optional<SessionOffer>& offer() const { return offer_; }
  SessionStatus known_status() const { return known_status_; }
  std::size_t requests_sent() const { return requests_sent_; }
  std::size_t malformed_dropped() const { return malformed_dropped_; }

  /// Exposed so tests can drive the agent without a bus.
  void on_advertisement(const std::string& encoded);

 private:
  struct Attempt {
    TotpCode code;
    bool succeeded = false;
  };

  std::string name_;
  std::string actor_;
  std::string scope_;
  std::string rp_url_;
  DeliveryMode mode_;
  Endpoint endpoint_;
  AdvertisementBus& bus_;
  const Clock& clock_;

  std::optional<AdvertisementBus::SubscriptionId> subscription_;
  std::optional<SessionOffer> offer_;
  SessionStatus known_status_ = SessionStatus::Pending;
  bool finished_ = false;
  std::map<DeviceId, Attempt> attempts_;
  std::size_t requests_sent_ = 0;
  std::size_t malformed_dropped_ = 0;
};

}  // namespace trustware::sim
