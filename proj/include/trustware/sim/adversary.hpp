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

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trustware/sim/devices.hpp"
#include "trustware/sim/protocol_client.hpp"
#include "trustware/sim/scheduler.hpp"

namespace trustware::sim {

enum class AdversaryKind { Replayer, Miner, Eater };

std::string_view to_string(AdversaryKind kind);
std::optional<AdversaryKind> parse_adversary_kind(std::string_view text);

/// Time fields are offsets in seconds from the adversary's start.
/// Adversaries only ever see overheard advertisements, never secrets.
struct AdversaryScript {
  std::string name;
  AdversaryKind kind = AdversaryKind::Miner;
  std::string scope;
  std::int64_t harvest_window_s = 30;
  /// replayer: resubmission delays after first hearing a code
  std::vector<std::int64_t> replay_delays_s{15, 40, 70};
  /// miner: hold time between redeeming a voucher and delivering it
  std::int64_t deliver_delay_s = 0;
  /// miner: sessions each voucher is delivered to; "self" is the attacker's own
  std::vector<std::string> targets{"self"};
  /// eater: request cadence and duration
  std::int64_t period_s = 10;
  std::int64_t run_for_s = 60;
  /// eater: restrict to one device
  std::optional<DeviceId> target_device;
};

struct AttackEvent {
  UnixSeconds t = 0;
  std::string action;  // "redeem" or "deliver"
  std::string device;
  std::string session;
  std::string result;  // "voucher", "rejected", "accepted", "unreachable"
  std::string reason;
  std::optional<int> trust;
};

class Adversary {
 public:
  using TokenResolver = std::function<std::optional<SessionToken>(const std::string& target)>;

  Adversary(AdversaryScript script, Scheduler& scheduler, Endpoint endpoint, AdvertisementBus& bus,
            std::string rp_url, std::uint64_t seed, TokenResolver resolve);
  ~Adversary();
  Adversary(const Adversary&) = delete;
  Adversary& operator=(const Adversary&) = delete;

  /// Opens the attacker's own session; replayers and miners need one.
  std::optional<SessionOffer> open_session();

  /// Starts listening and schedules the script relative to now.
  void start();

  const AdversaryScript& script() const { return script_; }
  const std::string& actor() const { return actor_; }
  const std::optional<SessionOffer>& offer() const { return offer_; }
  const std::vector<AttackEvent>& trace() const { return trace_; }

 private:
  void on_advertisement(const std::string& encoded);
  void redeem(const Advertisement& ad, bool deliver);
  void deliver(const TrustVoucher& voucher);
  void eat();
  SessionToken request_token();

  AdversaryScript script_;
  std::string actor_;
  Scheduler& scheduler_;
  Endpoint endpoint_;
  AdvertisementBus& bus_;
  std::string rp_url_;
  Rng rng_;
  TokenResolver resolve_;

  std::optional<AdvertisementBus::SubscriptionId> subscription_;
  std::optional<SessionOffer> offer_;
  UnixSeconds started_at_ = 0;
  std::set<std::pair<DeviceId, TotpCode>> seen_codes_;
  std::map<DeviceId, Advertisement> latest_;
  std::vector<AttackEvent> trace_;
};

}  // namespace trustware::sim
