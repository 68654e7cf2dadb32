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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trustware/sim/adversary.hpp"
#include "trustware/sim/agent.hpp"
#include "trustware/sim/ledger.hpp"
#include "trustware/trust_engine.hpp"

namespace trustware::sim {

enum class ClockMode { Virtual, Real };
enum class TransportKind { Http, InProcess };

struct ManufacturerSpec {
  std::string name;
  std::string url;
  std::string heuristic = "inverse-use";
  std::int64_t rate_limit_s = 10;
  std::int64_t skew_intervals = 1;
};

struct DeviceSpec {
  std::string name;
  std::string manufacturer;
  std::string scope;
  std::int64_t clock_offset_s = 0;
  DeviceBehavior behavior = DeviceBehavior::Honest;
};

struct AgentSpec {
  std::string name;
  std::string scope;
  std::int64_t open_at_s = 0;
};

struct AdversarySpec {
  AdversaryScript script;
  std::int64_t start_s = 0;
  bool open_session = true;
  std::optional<std::string> target_device;
};

/// Time offsets are seconds from `start`.
struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 1;
  ClockMode clock = ClockMode::Virtual;
  TransportKind transport = TransportKind::Http;
  DeliveryMode delivery_mode = DeliveryMode::Relayed;
  bool compare_modes = false;
  UnixSeconds start = 1700000010;
  std::int64_t duration_s = 60;
  std::int64_t advert_period_s = 5;

  std::string rp_url = "https://rp.example";
  TrustPolicy policy;
  /// Manufacturers in the relying party's registry; empty means all.
  std::optional<std::vector<std::string>> trusted;

  std::vector<ManufacturerSpec> manufacturers;
  std::vector<DeviceSpec> devices;
  std::vector<AgentSpec> agents;
  std::vector<AdversarySpec> adversaries;
  /// Raw `[expect]` entries, checked after the run.
  std::vector<std::pair<std::string, std::string>> expectations;

  /// Throws ConfigInvalid.
  void validate() const;
};

/// INI-style text: `[scenario]`, `[relying_party]`, `[expect]` and one
/// `[manufacturer:NAME]`, `[device:NAME]`, `[agent:NAME]` or
/// `[adversary:NAME]` section per participant. Each override is
/// `section.key=value` and is applied before parsing. Throws ConfigInvalid.
ScenarioConfig parse_scenario(const std::string& text,
                              const std::vector<std::string>& overrides = {});

std::vector<std::string> builtin_scenario_names();
/// nullopt for unknown names.
std::optional<std::string> builtin_scenario(const std::string& name);

struct SessionOutcome {
  std::string owner;
  std::string token;
  SessionStatus status = SessionStatus::Pending;
  std::int64_t total_trust = 0;
  UnixSeconds created_at = 0;
  std::optional<UnixSeconds> decided_at;
};

struct IssuedVoucher {
  UnixSeconds t = 0;
  int trust = 0;
  std::string session;
  std::string voucher;
};

struct DeviceHistory {
  std::string name;
  std::string device_id;
  std::vector<IssuedVoucher> vouchers;
};

struct ExpectationResult {
  std::string check;
  std::string expected;
  std::string observed;
  bool ok = false;
};

struct ScenarioReport {
  std::string name;
  std::uint64_t seed = 0;
  DeliveryMode delivery_mode = DeliveryMode::Relayed;
  UnixSeconds start = 0;
  std::vector<SessionOutcome> sessions;
  std::vector<LedgerEntry> ledger;
  std::vector<DeviceHistory> devices;
  /// Largest encoded size seen per message kind.
  std::map<std::string, std::size_t> max_message_bytes;
  std::vector<ExpectationResult> expectations;
  /// Outcomes of the same scenario in the other delivery mode, if compared.
  std::optional<std::vector<SessionOutcome>> other_mode_sessions;

  const SessionOutcome* session(const std::string& owner) const;
  bool passed() const;
};

/// Throws ConfigInvalid for bad configs and ScenarioDeadlock when the run
/// ends with a session still pending.
ScenarioReport run_scenario(const ScenarioConfig& config);

enum class ReportFormat { JsonLines, SummaryText };

std::optional<ReportFormat> parse_report_format(std::string_view text);
std::string report_emit(const ScenarioReport& report, ReportFormat format);

}  // namespace trustware::sim
