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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "oracle/totp_oracle.hpp"
#include "trustware/otp.hpp"
#include "trustware/relying_party.hpp"
#include "trustware/service.hpp"
#include "trustware/sim/scenario.hpp"
#include "trustware/trust_engine.hpp"
#include "trustware/wire.hpp"

using namespace trustware;
using namespace trustware::sim;

namespace {

constexpr UnixSeconds kT0 = 1700000010;

struct Verdict {
  bool pass = false;
  std::string detail;
};

ScenarioConfig builtin(const std::string& name, std::vector<std::string> overrides = {}) {
  overrides.insert(overrides.begin(), "scenario.transport=inprocess");
  return parse_scenario(*builtin_scenario(name), overrides);
}

ManufacturerServer make_server(std::uint64_t seed) {
  Rng rng(seed);
  return ManufacturerServer({ManufacturerName::parse("acme"), "https://acme.example", SigningKey::generate(rng)},
                            TrustHeuristic::inverse_use(), 1, nullptr);
}

Verdict totp_oracle_equivalence() {
  const auto begin = std::chrono::steady_clock::now();
  Rng rng(20240601);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto secret = DeviceSecret::random(rng);
    const IntervalIndex idx{static_cast<std::int64_t>(rng.next() % 100'000'000'000ull)};
    if (totp(secret, idx).str() != oracle::totp(secret.key(), idx.value)) ++mismatches;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  std::ostringstream d;
  d << "1000 pairs, " << mismatches << " mismatches, " << secs << " s";
  return {mismatches == 0 && secs < 5.0, d.str()};
}

Verdict skew_window_exactness() {
  Rng rng(7331);
  int checks = 0, failures = 0;
  for (int i = 0; i < 200; ++i) {
    const auto secret = DeviceSecret::random(rng);
    const UnixSeconds boundary = (40'000'000 + static_cast<UnixSeconds>(rng.next() % 20'000'000)) * kTotpStepSeconds;
    for (UnixSeconds t : {boundary - 1, boundary, boundary + 1}) {
      for (std::int64_t age : {0, 30, 90}) {
        const auto code = totp(secret, interval_index(t - age)).str();
        const bool accepted = verify_totp(secret, code, t, 1).has_value();
        ++checks;
        if (accepted != (age <= 30)) ++failures;
      }
    }
  }
  return {failures == 0, std::to_string(checks) + " checks, " + std::to_string(failures) + " wrong"};
}

Verdict rate_limit() {
  int worst = 0;
  int bad_reasons = 0;
  int runs = 0;
  // Every phase of the driver relative to the 30 s interval grid.
  for (std::int64_t phase = 0; phase < 30; ++phase) {
    auto server = make_server(100 + static_cast<std::uint64_t>(phase));
    Rng rng(static_cast<std::uint64_t>(phase));
    const UnixSeconds start = kT0 + phase;
    const auto dev = server.provision_device(rng, start);
    int vouchers = 0;
    for (UnixSeconds t = start; t <= start + 60; ++t) {
      const VerificationRequest req{dev.device_id, totp(dev.secret, interval_index(t)), SessionToken::random(rng)};
      const auto out = server.handle_verification(req, t);
      if (std::holds_alternative<TrustVoucher>(out)) {
        ++vouchers;
      } else {
        const auto reason = std::get<VerificationRejection>(out).reason;
        if (reason != RejectReason::RateLimited && reason != RejectReason::ReplayedCode) ++bad_reasons;
      }
    }
    worst = std::max(worst, vouchers);
    ++runs;
  }
  return {worst <= 7 && bad_reasons == 0, std::to_string(runs) + " drivers, max " + std::to_string(worst) +
                                              " vouchers, " + std::to_string(bad_reasons) + " other rejections"};
}

Verdict trust_heuristic() {
  auto server = make_server(4);
  Rng rng(4);
  const auto dev = server.provision_device(rng, kT0);
  int mismatches = 0;
  std::string first;
  int n = 0;
  for (; n < 120; ++n) {
    const UnixSeconds t = kT0 + 30 * n;
    const auto out = server.handle_verification(
        {dev.device_id, totp(dev.secret, interval_index(t)), SessionToken::random(rng)}, t);
    const auto* v = std::get_if<TrustVoucher>(&out);
    if (v == nullptr || v->trust != 100 / (1 + n)) {
      if (first.empty()) first = " (direct use " + std::to_string(n) + ")";
      ++mismatches;
    }
  }
  // The same formula must hold for every inverse-use device history in the
  // built-ins.
  int histories = 0;
  for (const auto& name : builtin_scenario_names()) {
    const auto cfg = builtin(name);
    std::set<std::string> inverse_use;
    for (const auto& m : cfg.manufacturers) {
      if (m.heuristic != "inverse-use") continue;
      for (const auto& d : cfg.devices) {
        if (d.manufacturer == m.name) inverse_use.insert(d.name);
      }
    }
    for (const auto& d : run_scenario(cfg).devices) {
      if (!inverse_use.contains(d.name)) continue;
      for (std::size_t i = 0; i < d.vouchers.size(); ++i) {
        if (d.vouchers[i].trust != static_cast<int>(100 / (1 + i))) {
          if (first.empty()) first = " (" + name + "/" + d.name + " use " + std::to_string(i) + ")";
          ++mismatches;
        }
      }
      histories += d.vouchers.empty() ? 0 : 1;
    }
  }
  return {mismatches == 0, std::to_string(n) + " direct uses and " + std::to_string(histories) +
                               " scenario histories, " + std::to_string(mismatches) + " mismatches" + first};
}

Verdict voucher_integrity() {
  Rng rng(55);
  const auto key = SigningKey::generate(rng);
  ManufacturerRegistry reg;
  reg.add(ManufacturerName::parse("acme"), key.public_key());
  VirtualClock clock(kT0);
  RelyingParty rp("https://rp.example", std::move(reg), TrustPolicy{}, 1);
  RelyingPartyService svc(rp, clock);

  const auto token = rp.open_session(kT0).session_token;
  const auto voucher = sign_voucher({token, DeviceId::random(rng), 100, kT0, ManufacturerName::parse("acme"), {}}, key);
  const auto wire = encode_message(voucher);
  const auto sig_hex = hex_encode(voucher.signature);
  const auto sig_at = wire.find(sig_hex);

  int accepted = 0;
  int on_signature = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string mutated = wire;
    // Half the mutations land in the signature, half in the signed fields.
    std::size_t pos;
    if (i % 2 == 0) {
      pos = sig_at + rng.next() % sig_hex.size();
      ++on_signature;
    } else {
      do {
        pos = rng.next() % wire.size();
      } while (pos >= sig_at && pos < sig_at + sig_hex.size());
    }
    char c;
    do {
      c = static_cast<char>(rng.next() & 0xff);
    } while (c == wire[pos]);
    mutated[pos] = c;
    HttpRequest req;
    req.path = "/voucher";
    req.body = mutated;
    if (svc.handle(req).status == 200) ++accepted;
  }
  const bool untouched = rp.snapshot(token)->total_trust == 0;

  Rng rogue_rng(56);
  const auto rogue = sign_voucher(
      {token, DeviceId::random(rng), 100, kT0, ManufacturerName::parse("initech"), {}}, SigningKey::generate(rogue_rng));
  const auto rogue_out = rp.accept_voucher(token, rogue, kT0);
  const bool rogue_refused = std::holds_alternative<RejectReason>(rogue_out) &&
                             std::get<RejectReason>(rogue_out) == RejectReason::UnknownManufacturer;

  // The unmutated voucher is still good, so the refusals above were earned.
  const bool original_ok = std::holds_alternative<VoucherAccepted>(rp.accept_voucher(token, voucher, kT0));

  std::ostringstream d;
  d << "1000 mutations (" << on_signature << " in signature), " << accepted << " accepted; unknown manufacturer "
    << (rogue_refused ? "refused" : "ACCEPTED") << "; original " << (original_ok ? "accepted" : "refused");
  return {accepted == 0 && untouched && rogue_refused && original_ok, d.str()};
}

// Every built-in scenario is rerun with an extra miner that redeems what it
// overhears for itself and relays the vouchers into every agent's session.
// Where nobody can mint (no devices, codes outside the window, an eater
// winning every race) the check holds trivially, so at least one attempt per
// scenario is required only of the majority.
Verdict token_binding() {
  int miner_runs = 0;
  int scenarios_with_cross = 0;
  int cross_attempts = 0;
  int cross_refused = 0;
  int cross_accepted = 0;
  int token_mismatch = 0;
  for (const auto& name : builtin_scenario_names()) {
    auto base = builtin(name);
    std::string scope = !base.devices.empty() ? base.devices.front().scope
                        : !base.agents.empty() ? base.agents.front().scope
                                               : "nowhere";
    std::string targets = "self";
    for (const auto& a : base.agents) targets += "," + a.name;
    auto text = *builtin_scenario(name) + "\n[adversary:acceptance-miner]\nkind = miner\nscope = " + scope +
                "\nharvest_window_s = 60\ntargets = " + targets + "\n";
    // The injected miner changes outcomes, so the scenario's own checks no
    // longer apply.
    auto cfg = parse_scenario(text, {"scenario.transport=inprocess"});
    cfg.expectations.clear();
    const auto r = run_scenario(cfg);
    ++miner_runs;

    std::map<std::string, std::string> minted_for;
    for (const auto& e : r.ledger) {
      if (e.kind == "trust_voucher" && e.result == "issued") minted_for[e.voucher] = e.session;
    }
    int cross_here = 0;
    for (const auto& e : r.ledger) {
      if (e.voucher.empty() || !minted_for.contains(e.voucher)) continue;
      if (e.session == minted_for[e.voucher]) continue;
      if (e.kind == "trust_voucher" && e.result == "delivered") {
        ++cross_attempts;
        ++cross_here;
      }
      if (e.kind == "decision" && e.result == "accepted") ++cross_accepted;
      if (e.kind == "verification_rejection") {
        ++cross_refused;
        if (e.reason == "token_mismatch") ++token_mismatch;
      }
    }
    if (cross_here > 0) ++scenarios_with_cross;
  }
  std::ostringstream d;
  d << "miner ran in " << miner_runs << " scenarios, " << scenarios_with_cross << " with cross-session deliveries; "
    << cross_attempts << " attempts, " << cross_refused << " refused (" << token_mismatch << " token_mismatch), "
    << cross_accepted << " accepted";
  const bool ok = miner_runs >= 10 && 2 * scenarios_with_cross > miner_runs && cross_accepted == 0 &&
                  cross_refused == cross_attempts && token_mismatch > 0;
  return {ok, d.str()};
}

Verdict threshold_timeout() {
  const auto legit = run_scenario(builtin("legit-two-devices"));
  const auto timeout = run_scenario(builtin("timeout-no-devices"));
  const auto* a = legit.session("alice");
  const auto* b = timeout.session("alice");
  const bool legit_ok = a && a->status == SessionStatus::Granted && a->total_trust >= 100 && a->decided_at &&
                        *a->decided_at - a->created_at < 30;
  const bool timeout_ok = b && b->status == SessionStatus::Denied && b->decided_at &&
                          *b->decided_at - b->created_at == 30;
  std::ostringstream d;
  if (a && a->decided_at) d << "legit " << to_string(a->status) << " total=" << a->total_trust << " at +" << *a->decided_at - a->created_at << " s; ";
  if (b && b->decided_at) d << "timeout " << to_string(b->status) << " at +" << *b->decided_at - b->created_at << " s";
  return {legit_ok && timeout_ok, d.str()};
}

Verdict size_budget() {
  std::size_t largest = 0;
  std::string where;
  for (const auto& name : builtin_scenario_names()) {
    for (const char* mode : {"relayed", "direct"}) {
      const auto r = run_scenario(builtin(name, {std::string("scenario.delivery_mode=") + mode}));
      for (const auto& e : r.ledger) {
        if (e.bytes > largest) {
          largest = e.bytes;
          where = name + "/" + e.kind;
        }
      }
    }
  }
  return {largest < 1024, "largest " + std::to_string(largest) + " bytes (" + where + ")"};
}

std::string run_cli(const std::string& args, int& status) {
  std::string out;
  FILE* p = ::popen((std::string(TRUSTWARE_CLI) + " " + args + " 2>/dev/null").c_str(), "r");
  if (p == nullptr) {
    status = -1;
    return out;
  }
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  const int raw = ::pclose(p);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

Verdict determinism() {
  int s1 = 0, s2 = 0;
  const auto a = run_cli("sim run --scenario trust-mining --seed 42", s1);
  const auto b = run_cli("sim run --scenario trust-mining --seed 42", s2);
  const bool ok = s1 == 0 && s2 == 0 && !a.empty() && a == b;
  return {ok, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "DIFFERENT") + ", exit " +
                  std::to_string(s1) + "/" + std::to_string(s2)};
}

Verdict delivery_mode_equivalence() {
  int compared = 0, differing = 0;
  std::string first_diff;
  for (const auto& name : builtin_scenario_names()) {
    const auto relayed = run_scenario(builtin(name, {"scenario.delivery_mode=relayed"}));
    const auto direct = run_scenario(builtin(name, {"scenario.delivery_mode=direct"}));
    if (relayed.sessions.size() != direct.sessions.size()) {
      ++differing;
      continue;
    }
    for (const auto& s : relayed.sessions) {
      ++compared;
      const auto* o = direct.session(s.owner);
      if (!o || o->status != s.status || o->total_trust != s.total_trust) {
        ++differing;
        if (first_diff.empty()) first_diff = " (" + name + "/" + s.owner + ")";
      }
    }
  }
  return {differing == 0 && compared > 0,
          std::to_string(compared) + " sessions compared, " + std::to_string(differing) + " differ" + first_diff};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"totp oracle equivalence", totp_oracle_equivalence},
      {"skew window exactness", skew_window_exactness},
      {"rate limit", rate_limit},
      {"trust heuristic", trust_heuristic},
      {"voucher integrity", voucher_integrity},
      {"token binding", token_binding},
      {"threshold and timeout", threshold_timeout},
      {"size budget", size_budget},
      {"determinism", determinism},
      {"delivery mode equivalence", delivery_mode_equivalence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
