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
#include <set>

#include "../config_ini.hpp"
#include "trustware/sim/scenario.hpp"

namespace trustware::sim {
namespace {

using namespace trustware::config;

std::int64_t checked_policy_int(const std::string& where, std::int64_t v, std::int64_t lo, std::int64_t hi) {
  if (v < lo || v > hi) {
    invalid(where + ": " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::vector<std::string>& overrides) {
  const ptree tree = read_ini_text(text, overrides, "scenario file");

  ScenarioConfig cfg;
  for (const auto& [section_name, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      invalid("'" + section_name + "': keys must live inside a [section]");
    }
    const auto colon = section_name.find(':');
    const std::string kind = section_name.substr(0, colon);
    const std::string name = colon == std::string::npos ? "" : section_name.substr(colon + 1);
    Section s(section_name, body);

    if (section_name == "scenario") {
      s.read("name", cfg.name);
      if (auto v = s.str("seed")) {
        const auto seed = to_int("scenario.seed", *v);
        if (seed < 0) invalid("scenario.seed: must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(seed);
      }
      if (auto v = s.str("clock")) {
        if (*v == "virtual") cfg.clock = ClockMode::Virtual;
        else if (*v == "real") cfg.clock = ClockMode::Real;
        else invalid("scenario.clock: expected virtual or real");
      }
      if (auto v = s.str("transport")) {
        if (*v == "http") cfg.transport = TransportKind::Http;
        else if (*v == "inprocess") cfg.transport = TransportKind::InProcess;
        else invalid("scenario.transport: expected http or inprocess");
      }
      if (auto v = s.str("delivery_mode")) {
        auto mode = parse_delivery_mode(*v);
        if (!mode) invalid("scenario.delivery_mode: expected relayed or direct");
        cfg.delivery_mode = *mode;
      }
      s.read("compare_modes", cfg.compare_modes);
      s.read("start", cfg.start);
      s.read("duration_s", cfg.duration_s);
      s.read("advert_period_s", cfg.advert_period_s);
    } else if (section_name == "relying_party") {
      s.read("url", cfg.rp_url);
      std::int64_t v = cfg.policy.threshold;
      s.read("threshold", v);
      cfg.policy.threshold = static_cast<int>(checked_policy_int("relying_party.threshold", v, 0, 1'000'000));
      s.read("session_timeout_s", cfg.policy.session_timeout_s);
      s.read("voucher_freshness_s", cfg.policy.voucher_freshness_s);
      if (auto t = s.str("trusted")) cfg.trusted = split_list(*t);
    } else if (kind == "manufacturer" && !name.empty()) {
      ManufacturerSpec m{.name = name};
      m.url = s.required("url");
      s.read("heuristic", m.heuristic);
      s.read("rate_limit_s", m.rate_limit_s);
      s.read("skew_intervals", m.skew_intervals);
      cfg.manufacturers.push_back(std::move(m));
    } else if (kind == "device" && !name.empty()) {
      DeviceSpec d{.name = name};
      d.manufacturer = s.required("manufacturer");
      d.scope = s.required("scope");
      s.read("clock_offset_s", d.clock_offset_s);
      if (auto b = s.str("behavior")) {
        if (*b == "honest") d.behavior = DeviceBehavior::Honest;
        else if (*b == "silent") d.behavior = DeviceBehavior::Silent;
        else invalid(section_name + ".behavior: expected honest or silent");
      }
      cfg.devices.push_back(std::move(d));
    } else if (kind == "agent" && !name.empty()) {
      AgentSpec a{.name = name};
      a.scope = s.required("scope");
      s.read("open_at_s", a.open_at_s);
      cfg.agents.push_back(std::move(a));
    } else if (kind == "adversary" && !name.empty()) {
      AdversarySpec a;
      a.script.name = name;
      auto k = parse_adversary_kind(s.required("kind"));
      if (!k) invalid(section_name + ".kind: expected replayer, miner or eater");
      a.script.kind = *k;
      a.open_session = a.script.kind != AdversaryKind::Eater;
      a.script.scope = s.required("scope");
      s.read("start_s", a.start_s);
      s.read("open_session", a.open_session);
      s.read("harvest_window_s", a.script.harvest_window_s);
      if (auto v = s.str("replay_delays_s")) {
        a.script.replay_delays_s.clear();
        for (const auto& d : split_list(*v)) {
          a.script.replay_delays_s.push_back(to_int(section_name + ".replay_delays_s", d));
        }
      }
      s.read("deliver_delay_s", a.script.deliver_delay_s);
      if (auto v = s.str("targets")) a.script.targets = split_list(*v);
      s.read("period_s", a.script.period_s);
      s.read("run_for_s", a.script.run_for_s);
      if (auto v = s.str("target_device")) a.target_device = *v;
      cfg.adversaries.push_back(std::move(a));
    } else if (section_name == "expect") {
      for (const auto& [key, value] : body) {
        cfg.expectations.emplace_back(key, value.data());
        s.str(key);
      }
    } else {
      invalid("unknown section [" + section_name + "]");
    }
    s.finish();
  }
  cfg.validate();
  return cfg;
}

void ScenarioConfig::validate() const {
  if (name.empty()) invalid("scenario.name: required");
  if (start < 0) invalid("scenario.start: must be non-negative");
  if (duration_s <= 0) invalid("scenario.duration_s: must be positive");
  if (advert_period_s <= 0) invalid("scenario.advert_period_s: must be positive");
  try {
    policy.validate();
  } catch (const Error& e) {
    invalid(std::string("relying_party: ") + e.what());
  }

  std::set<std::string> manufacturer_names;
  std::set<std::string> manufacturer_urls{rp_url};
  for (const auto& m : manufacturers) {
    if (!ManufacturerName::try_parse(m.name)) invalid("manufacturer '" + m.name + "': bad name");
    manufacturer_names.insert(m.name);
    if (!manufacturer_urls.insert(m.url).second) invalid("manufacturer:" + m.name + ".url: already in use");
    try {
      TrustHeuristic::parse(m.heuristic, m.rate_limit_s);
    } catch (const Error& e) {
      invalid("manufacturer:" + m.name + ".heuristic: " + e.what());
    }
    if (m.rate_limit_s < 0) invalid("manufacturer:" + m.name + ".rate_limit_s: must be non-negative");
    if (m.skew_intervals < 0 || m.skew_intervals > 10) {
      invalid("manufacturer:" + m.name + ".skew_intervals: outside [0, 10]");
    }
  }
  if (trusted) {
    for (const auto& t : *trusted) {
      if (!manufacturer_names.contains(t)) invalid("relying_party.trusted: unknown manufacturer '" + t + "'");
    }
  }

  std::set<std::string> device_names;
  for (const auto& d : devices) {
    device_names.insert(d.name);
    if (!manufacturer_names.contains(d.manufacturer)) {
      invalid("device:" + d.name + ".manufacturer: unknown manufacturer '" + d.manufacturer + "'");
    }
  }

  std::set<std::string> actors;
  for (const auto& a : agents) {
    if (!actors.insert(a.name).second) invalid("agent '" + a.name + "': name already used");
    if (a.open_at_s < 0) invalid("agent:" + a.name + ".open_at_s: must be non-negative");
  }
  for (const auto& a : adversaries) {
    const auto& sc = a.script;
    const std::string where = "adversary:" + sc.name;
    if (!actors.insert(sc.name).second) invalid(where + ": name already used");
    if (a.start_s < 0) invalid(where + ".start_s: must be non-negative");
    if (sc.harvest_window_s < 0) invalid(where + ".harvest_window_s: must be non-negative");
    if (sc.deliver_delay_s < 0) invalid(where + ".deliver_delay_s: must be non-negative");
    if (sc.kind == AdversaryKind::Eater && sc.period_s <= 0) invalid(where + ".period_s: must be positive");
    if (sc.run_for_s < 0) invalid(where + ".run_for_s: must be non-negative");
    for (auto d : sc.replay_delays_s) {
      if (d < 0) invalid(where + ".replay_delays_s: must be non-negative");
    }
    if (a.target_device && !device_names.contains(*a.target_device)) {
      invalid(where + ".target_device: unknown device '" + *a.target_device + "'");
    }
  }
  for (const auto& a : adversaries) {
    for (const auto& t : a.script.targets) {
      if (t != "self" && !actors.contains(t)) {
        invalid("adversary:" + a.script.name + ".targets: unknown participant '" + t + "'");
      }
    }
  }

  for (const auto& [key, value] : expectations) {
    const auto dot = key.find('.');
    const std::string check = key.substr(0, dot);
    const std::string subject = dot == std::string::npos ? "" : key.substr(dot + 1);
    static const std::set<std::string> session_checks{"session", "total", "min_total", "decided_at"};
    static const std::set<std::string> device_checks{"max_vouchers", "trust_sequence"};
    if (session_checks.contains(check)) {
      if (!actors.contains(subject)) invalid("expect." + key + ": unknown participant");
    } else if (device_checks.contains(check)) {
      if (!device_names.contains(subject)) invalid("expect." + key + ": unknown device");
    } else if (check == "min_rejections") {
      if (!parse_reject_reason(subject)) invalid("expect." + key + ": unknown rejection reason");
    } else {
      invalid("expect." + key + ": unknown check");
    }
    if (value.empty()) invalid("expect." + key + ": empty value");
  }
}

}  // namespace trustware::sim
