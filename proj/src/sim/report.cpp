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
#include <sstream>

#include "trustware/sim/scenario.hpp"
#include "trustware/wire.hpp"

namespace trustware::sim {
namespace {

using nlohmann::json;

json optional_int(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

json session_json(const SessionOutcome& s) {
  return {{"type", "session"},
          {"owner", s.owner},
          {"session", s.token},
          {"status", std::string(to_string(s.status))},
          {"total_trust", s.total_trust},
          {"created_at", s.created_at},
          {"decided_at", optional_int(s.decided_at)},
          {"elapsed_s", s.decided_at ? json(*s.decided_at - s.created_at) : json(nullptr)}};
}

std::map<std::string, std::size_t> rejection_counts(const ScenarioReport& report) {
  std::map<std::string, std::size_t> counts;
  for (const auto& e : report.ledger) {
    if (e.kind == "verification_rejection") ++counts[e.reason];
  }
  return counts;
}

struct Tally {
  std::size_t granted = 0, denied = 0, pending = 0;
};

Tally tally(const ScenarioReport& report) {
  Tally t;
  for (const auto& s : report.sessions) {
    switch (s.status) {
      case SessionStatus::Granted: ++t.granted; break;
      case SessionStatus::Denied: ++t.denied; break;
      case SessionStatus::Pending: ++t.pending; break;
    }
  }
  return t;
}

std::string jsonlines(const ScenarioReport& report) {
  std::string out;
  auto line = [&out](const json& j) {
    out += canonical_dump(j);
    out += '\n';
  };

  line({{"type", "scenario"},
        {"name", report.name},
        {"seed", report.seed},
        {"delivery_mode", std::string(to_string(report.delivery_mode))},
        {"start", report.start}});
  for (const auto& s : report.sessions) line(session_json(s));
  for (const auto& e : report.ledger) {
    line({{"type", "ledger"},
          {"t", e.t},
          {"seq", e.seq},
          {"from", e.from},
          {"to", e.to},
          {"kind", e.kind},
          {"session", e.session},
          {"device", e.device},
          {"voucher", e.voucher},
          {"trust", e.trust ? json(*e.trust) : json(nullptr)},
          {"result", e.result},
          {"reason", e.reason},
          {"bytes", e.bytes}});
  }
  for (const auto& d : report.devices) {
    json vouchers = json::array();
    for (const auto& v : d.vouchers) {
      vouchers.push_back({{"t", v.t}, {"trust", v.trust}, {"session", v.session}, {"voucher", v.voucher}});
    }
    line({{"type", "device"}, {"name", d.name}, {"device_id", d.device_id}, {"vouchers", vouchers}});
  }
  for (const auto& [kind, bytes] : report.max_message_bytes) {
    line({{"type", "message_size"}, {"kind", kind}, {"max_bytes", bytes}});
  }
  if (report.other_mode_sessions) {
    const auto other = report.delivery_mode == DeliveryMode::Relayed ? DeliveryMode::Direct : DeliveryMode::Relayed;
    for (const auto& s : *report.other_mode_sessions) {
      json j = session_json(s);
      j["type"] = "other_mode_session";
      j["delivery_mode"] = std::string(to_string(other));
      line(j);
    }
  }
  for (const auto& r : report.expectations) {
    line({{"type", "expectation"},
          {"check", r.check},
          {"expected", r.expected},
          {"observed", r.observed},
          {"ok", r.ok}});
  }
  const auto t = tally(report);
  line({{"type", "summary"},
        {"sessions", report.sessions.size()},
        {"granted", t.granted},
        {"denied", t.denied},
        {"pending", t.pending},
        {"rejections", rejection_counts(report)},
        {"passed", report.passed()}});
  return out;
}

std::string summary_text(const ScenarioReport& report) {
  std::ostringstream out;
  const auto t = tally(report);
  out << "scenario " << report.name << " (seed " << report.seed << ", " << to_string(report.delivery_mode)
      << " delivery)\n";
  out << "sessions: " << report.sessions.size() << "  granted: " << t.granted << "  denied: " << t.denied
      << "  pending: " << t.pending << "\n";
  for (const auto& s : report.sessions) {
    out << "  " << s.owner << ": " << to_string(s.status) << " total=" << s.total_trust;
    if (s.decided_at) out << " after " << (*s.decided_at - s.created_at) << "s";
    out << "\n";
  }

  std::vector<std::pair<std::string, std::size_t>> reasons;
  for (const auto& kv : rejection_counts(report)) reasons.push_back(kv);
  std::stable_sort(reasons.begin(), reasons.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  out << "top rejections:";
  if (reasons.empty()) out << " none";
  for (std::size_t i = 0; i < reasons.size() && i < 5; ++i) {
    out << (i ? ", " : " ") << reasons[i].first << " x" << reasons[i].second;
  }
  out << "\n";

  for (const auto& d : report.devices) {
    out << "device " << d.name << " trust:";
    if (d.vouchers.empty()) out << " -";
    for (const auto& v : d.vouchers) out << " " << v.trust;
    out << "\n";
  }
  std::size_t largest = 0;
  for (const auto& [kind, bytes] : report.max_message_bytes) largest = std::max(largest, bytes);
  out << "largest message: " << largest << " bytes\n";

  const auto ok = std::ranges::count_if(report.expectations, &ExpectationResult::ok);
  out << "expectations: " << ok << "/" << report.expectations.size() << " passed\n";
  for (const auto& r : report.expectations) {
    if (!r.ok) out << "  FAIL " << r.check << ": expected " << r.expected << ", observed " << r.observed << "\n";
  }
  return out.str();
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "jsonlines") return ReportFormat::JsonLines;
  if (text == "summary-text") return ReportFormat::SummaryText;
  return std::nullopt;
}

std::string report_emit(const ScenarioReport& report, ReportFormat format) {
  return format == ReportFormat::JsonLines ? jsonlines(report) : summary_text(report);
}

}  // namespace trustware::sim
