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

#include <algorithm>
#include <map>

#include "trustware/sim/scenario.hpp"

namespace trustware::sim {
namespace {

// Scenario start 1700000010 sits on a 30 s interval boundary, so offsets
// below map directly onto TOTP intervals.
constexpr const char* kAcme = R"(
[manufacturer:acme]
url = https://acme.example
heuristic = inverse-use
)";

constexpr const char* kGlobex = R"(
[manufacturer:globex]
url = https://globex.example
heuristic = inverse-use
)";

std::string clock_skew(int offset, const char* verdict) {
  return std::string(R"(
[scenario]
name = clock-skew-)") + std::to_string(offset) + R"(
duration_s = 40
)" + kAcme + R"(
[device:phone]
manufacturer = acme
scope = home
clock_offset_s = -)" + std::to_string(offset) + R"(

[agent:alice]
scope = home

[expect]
session.alice = )" + verdict + "\n";
}

const std::map<std::string, std::string>& catalogue() {
  static const std::map<std::string, std::string> scenarios = [] {
    std::map<std::string, std::string> s;

    s["legit-two-devices"] = std::string(R"(
[scenario]
name = legit-two-devices
duration_s = 40
)") + kAcme + kGlobex + R"(
[device:phone]
manufacturer = acme
scope = home

[device:laptop]
manufacturer = globex
scope = home

[agent:alice]
scope = home

[expect]
session.alice = granted
min_total.alice = 100
decided_at.alice = 0
)";

    s["timeout-no-devices"] = std::string(R"(
[scenario]
name = timeout-no-devices
duration_s = 40
)") + kAcme + R"(
[agent:alice]
scope = home

[expect]
session.alice = denied
total.alice = 0
decided_at.alice = 30
)";

    s["replay-attack"] = std::string(R"(
[scenario]
name = replay-attack
duration_s = 80
)") + kAcme + R"(
[device:phone]
manufacturer = acme
scope = home

[agent:alice]
scope = home

[adversary:replayer]
kind = replayer
scope = home
harvest_window_s = 0
replay_delays_s = 15,40,70

[expect]
session.alice = granted
session.replayer = denied
min_rejections.replayed_code = 2
min_rejections.bad_totp = 1
trust_sequence.phone = 100
)";

    s["trust-mining"] = std::string(R"(
[scenario]
name = trust-mining
duration_s = 40
)") + kAcme + R"(
[device:phone]
manufacturer = acme
scope = home

[agent:alice]
scope = home
open_at_s = 2

[adversary:mallory]
kind = miner
scope = home
harvest_window_s = 10
deliver_delay_s = 3
targets = self,alice

[expect]
session.mallory = granted
session.alice = denied
total.alice = 50
decided_at.alice = 32
min_rejections.token_mismatch = 1
min_rejections.rate_limited = 1
trust_sequence.phone = 100,50
)";

    s["mining-expiry"] = std::string(R"(
[scenario]
name = mining-expiry
duration_s = 130

[relying_party]
session_timeout_s = 120
)") + kAcme + R"(
[device:stranger-phone]
manufacturer = acme
scope = cafe

[agent:bob]
scope = office

[adversary:mallory]
kind = miner
scope = cafe
harvest_window_s = 0
deliver_delay_s = 61
targets = self,bob

[expect]
session.mallory = denied
session.bob = denied
min_rejections.stale_voucher = 1
min_rejections.token_mismatch = 1
)";

    s["trust-eating"] = std::string(R"(
[scenario]
name = trust-eating
duration_s = 100
)") + kAcme + R"(
[device:phone]
manufacturer = acme
scope = home

[agent:alice]
scope = home
open_at_s = 65

[adversary:eve]
kind = eater
scope = home
period_s = 10
run_for_s = 60
target_device = phone

[expect]
session.alice = denied
total.alice = 25
decided_at.alice = 95
max_vouchers.phone = 7
min_rejections.rate_limited = 1
trust_sequence.phone = 100,50,33,25
)";

    s["clock-skew-30"] = clock_skew(30, "granted");
    s["clock-skew-60"] = clock_skew(60, "denied");
    s["clock-skew-90"] = clock_skew(90, "denied");

    s["shared-device"] = std::string(R"(
[scenario]
name = shared-device
start = 1700000035
duration_s = 50
)") + kAcme + R"(
[device:phone]
manufacturer = acme
scope = library

[agent:alice]
scope = library

[agent:bob]
scope = library
open_at_s = 10

[expect]
session.alice = granted
total.alice = 100
session.bob = denied
total.bob = 50
trust_sequence.phone = 100,50
)";

    s["remote-access"] = std::string(R"(
[scenario]
name = remote-access
duration_s = 40
)") + kAcme + R"(
[device:phone]
manufacturer = acme
scope = home

[agent:alice]
scope = remote-desktop

[expect]
session.alice = denied
total.alice = 0
max_vouchers.phone = 0
)";

    s["delivery-mode-equivalence"] = std::string(R"(
[scenario]
name = delivery-mode-equivalence
duration_s = 40
compare_modes = true

[relying_party]
threshold = 240

[manufacturer:acme]
url = https://acme.example
heuristic = inverse-use

[manufacturer:globex]
url = https://globex.example
heuristic = constant:40

[device:phone]
manufacturer = acme
scope = home

[device:watch]
manufacturer = acme
scope = home
clock_offset_s = -30

[device:laptop]
manufacturer = globex
scope = home

[agent:alice]
scope = home

[expect]
session.alice = granted
total.alice = 240
)");
    return s;
  }();
  return scenarios;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  static const std::vector<std::string> order{
      "legit-two-devices", "timeout-no-devices", "replay-attack",  "trust-mining",
      "mining-expiry",     "trust-eating",       "clock-skew-30",  "clock-skew-60",
      "clock-skew-90",     "shared-device",      "remote-access",  "delivery-mode-equivalence",
  };
  return order;
}

std::optional<std::string> builtin_scenario(const std::string& name) {
  const auto& all = catalogue();
  auto it = all.find(name);
  if (it == all.end()) return std::nullopt;
  return it->second;
}

}  // namespace trustware::sim
