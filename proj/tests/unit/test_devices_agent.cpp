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

#include "doctest.h"
#include "trustware/codec.hpp"
#include "trustware/error.hpp"
#include "trustware/sim/adversary.hpp"
#include "trustware/sim/agent.hpp"
#include "trustware/sim/devices.hpp"
#include "trustware/wire.hpp"

using namespace trustware;
using namespace trustware::sim;

namespace {

constexpr UnixSeconds kT0 = 1700000010;
const std::string kRp = "https://rp.example";
const std::string kAcme = "https://acme.example";

/// Records every byte that crosses it.
class RecordingTransport final : public Transport {
 public:
  explicit RecordingTransport(Transport& inner) : inner_(inner) {}
  HttpResponse send(const std::string& base_url, const HttpRequest& request) override {
    traffic.push_back(request.body);
    for (const auto& [k, v] : request.query) traffic.push_back(k + "=" + v);
    auto r = inner_.send(base_url, request);
    traffic.push_back(r.body);
    return r;
  }
  std::vector<std::string> traffic;

 private:
  Transport& inner_;
};

struct World {
  explicit World(TrustPolicy policy = {})
      : acme({ManufacturerName::parse("acme"), kAcme, key()}, TrustHeuristic::inverse_use(), 1, nullptr),
        acme_service(
            acme, clock,
            [this](const TrustVoucher& v, const std::string& url) {
              deliver_voucher(Endpoint{direct, ledger}, kAcme, url, v, std::nullopt);
            },
            std::nullopt, 3),
        rp(kRp, registry(), policy, 4),
        rp_service(rp, clock) {
    local.route(kRp, rp_service);
    local.route(kAcme, acme_service);
    direct_local.route(kRp, rp_service);
  }

  static SigningKey key() {
    Rng rng(99);
    return SigningKey::generate(rng);
  }
  static ManufacturerRegistry registry() {
    ManufacturerRegistry r;
    r.add(ManufacturerName::parse("acme"), key().public_key());
    return r;
  }

  EmulatedDevice device(const std::string& scope, std::int64_t offset = 0) {
    const auto rec = acme.provision_device(rng, kT0);
    devices.push_back({rec.device_id, rec.secret, kAcme, offset, DeviceBehavior::Honest, scope});
    return devices.back();
  }

  void broadcast(const EmulatedDevice& d) { bus.publish(d.scope, encode_message(advertise(d, clock.now()))); }

  /// Every device advertises every 5 s from the current time up to `end`.
  void schedule_adverts(UnixSeconds end) {
    for (UnixSeconds t = clock.now(); t <= end; t += 5) {
      scheduler.at(t, Phase::Advertise, [this] {
        for (const auto& d : devices) broadcast(d);
      });
    }
  }

  Endpoint endpoint() { return {transport, ledger}; }

  std::vector<LedgerEntry> entries(const std::string& kind, const std::string& from = "") const {
    std::vector<LedgerEntry> out;
    for (const auto& e : ledger.entries()) {
      if (e.kind == kind && (from.empty() || e.from == from)) out.push_back(e);
    }
    return out;
  }

  VirtualClock clock{kT0};
  Scheduler scheduler{clock};
  Ledger ledger{clock};
  AdvertisementBus bus;
  Rng rng{17};
  ManufacturerServer acme;
  ManufacturerService acme_service;
  RelyingParty rp;
  RelyingPartyService rp_service;
  InProcessTransport local;
  InProcessTransport direct_local;
  RecordingTransport transport{local};
  RecordingTransport direct{direct_local};
  std::vector<EmulatedDevice> devices;
};

std::optional<RejectReason> verify_ad(World& w, const Advertisement& ad) {
  const auto out = w.acme.handle_verification({ad.device_id, ad.totp_code, SessionToken::random(w.rng)}, w.clock.now());
  if (const auto* r = std::get_if<VerificationRejection>(&out)) return r->reason;
  return std::nullopt;
}

}  // namespace

TEST_CASE("advertise under clock offsets") {
  World w;
  w.clock.set(kT0 + 12);
  const auto d0 = w.device("home", 0);
  const auto d30 = w.device("home", -30);
  const auto d90 = w.device("home", -90);

  const auto ad = advertise(d0, w.clock.now());
  CHECK(ad.device_id == d0.device_id);
  CHECK(ad.manufacturer_url == kAcme);
  CHECK(ad.totp_code == totp(d0.secret, interval_index(kT0 + 12)));
  CHECK_FALSE(verify_ad(w, ad));
  CHECK(advertise(d30, w.clock.now()).totp_code == totp(d30.secret, interval_index(kT0 + 12 - 30)));
  CHECK_FALSE(verify_ad(w, advertise(d30, w.clock.now())));
  CHECK(verify_ad(w, advertise(d90, w.clock.now())) == RejectReason::BadTotp);

  auto silent = d0;
  silent.behavior = DeviceBehavior::Silent;
  CHECK_THROWS_AS(advertise(silent, kT0), Error);
}

TEST_CASE("roster files round-trip") {
  Rng rng(1);
  std::vector<EmulatedDevice> devices;
  for (int i = 0; i < 20; ++i) {
    devices.push_back({DeviceId::random(rng), DeviceSecret::random(rng), "https://m" + std::to_string(i) + ".example",
                       static_cast<std::int64_t>(rng.next() % 200) - 100,
                       i % 3 == 0 ? DeviceBehavior::Silent : DeviceBehavior::Honest, "scope-" + std::to_string(i % 4)});
  }
  const auto text = format_roster(devices);
  std::istringstream in("# roster\n\n" + text);
  const auto back = parse_roster(in);
  REQUIRE(back.size() == devices.size());
  for (std::size_t i = 0; i < devices.size(); ++i) {
    CHECK(back[i].device_id == devices[i].device_id);
    CHECK(back[i].secret == devices[i].secret);
    CHECK(back[i].manufacturer_url == devices[i].manufacturer_url);
    CHECK(back[i].clock_offset_s == devices[i].clock_offset_s);
    CHECK(back[i].behavior == devices[i].behavior);
    CHECK(back[i].scope == devices[i].scope);
  }
  CHECK(format_roster(back) == text);

  const std::string good = "0011223344556677,GEZDGNBVGY3TQOJQ,https://acme.example,-30,honest,home";
  std::istringstream ok(good + "\r\n");
  CHECK(parse_roster(ok).at(0).clock_offset_s == -30);
  for (const std::string bad : std::vector<std::string>{
           "0011223344556677,GEZDGNBVGY3TQOJQ,https://acme.example,0,honest",
           "001122334455667,GEZDGNBVGY3TQOJQ,https://acme.example,0,honest,home",
           "0011223344556677,GEZDGNBVGY3TQOJ1,https://acme.example,0,honest,home",
           "0011223344556677,GEZDGNBVGY3TQOJQ,,0,honest,home",
           "0011223344556677,GEZDGNBVGY3TQOJQ,https://acme.example,3s,honest,home",
           "0011223344556677,GEZDGNBVGY3TQOJQ,https://acme.example,0,sneaky,home",
           "0011223344556677,GEZDGNBVGY3TQOJQ,https://acme.example,0,honest,"}) {
    std::istringstream in_bad(bad + "\n");
    try {
      parse_roster(in_bad);
      FAIL("expected ConfigInvalid: " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ConfigInvalid);
    }
  }
}

TEST_CASE("the bus delivers only within a scope, in order") {
  AdvertisementBus bus;
  std::vector<std::string> home_a, home_b, office;
  const auto a = bus.subscribe("home", [&](const std::string& m) { home_a.push_back(m); });
  bus.subscribe("home", [&](const std::string& m) { home_b.push_back(m); });
  bus.subscribe("office", [&](const std::string& m) { office.push_back(m); });

  CHECK(bus.publish("home", "1") == 2);
  CHECK(bus.publish("home", "2") == 2);
  CHECK(bus.publish("office", "3") == 1);
  CHECK(bus.publish("garden", "4") == 0);
  bus.unsubscribe(a);
  CHECK(bus.publish("home", "5") == 1);

  CHECK(home_a == std::vector<std::string>{"1", "2"});
  CHECK(home_b == std::vector<std::string>{"1", "2", "5"});
  CHECK(office == std::vector<std::string>{"3"});
}

TEST_CASE("an agent sends one request per device and reaches a grant") {
  TrustPolicy p;
  p.threshold = 150;
  World w(p);
  const auto phone = w.device("home");
  const auto laptop = w.device("home");
  ClientAgent agent("alice", "home", kRp, DeliveryMode::Relayed, w.endpoint(), w.bus, w.clock);
  const auto offer = agent.start();
  REQUIRE(offer);

  w.broadcast(phone);
  w.broadcast(phone);
  CHECK(agent.requests_sent() == 1);
  w.broadcast(laptop);
  CHECK(agent.requests_sent() == 2);
  CHECK(agent.known_status() == SessionStatus::Granted);

  const auto requests = w.entries("verification_request", "agent:alice");
  REQUIRE(requests.size() == 2);
  CHECK(requests[0].device != requests[1].device);
  const auto decision = w.rp.session_decision(offer->session_token, w.clock.now());
  CHECK(decision.status == SessionStatus::Granted);
  CHECK(decision.total_trust == 200);

  // Once granted the agent stops spending device trust.
  w.clock.advance(30);
  w.broadcast(laptop);
  CHECK(agent.requests_sent() == 2);
}

TEST_CASE("an agent retries a refused device only on a new code") {
  TrustPolicy p;
  p.threshold = 200;
  p.session_timeout_s = 120;
  World w(p);
  const auto phone = w.device("home");
  // Spend the current code elsewhere first.
  REQUIRE_FALSE(verify_ad(w, advertise(phone, kT0)));

  ClientAgent agent("alice", "home", kRp, DeliveryMode::Relayed, w.endpoint(), w.bus, w.clock);
  REQUIRE(agent.start());
  w.clock.advance(12);
  w.broadcast(phone);
  w.clock.advance(5);
  w.broadcast(phone);
  CHECK(agent.requests_sent() == 1);
  w.clock.set(kT0 + 30);
  w.broadcast(phone);
  CHECK(agent.requests_sent() == 2);
  CHECK(w.rp.snapshot(agent.offer()->session_token)->total_trust == 50);
}

TEST_CASE("an agent drops malformed advertisements") {
  World w;
  ClientAgent agent("alice", "home", kRp, DeliveryMode::Relayed, w.endpoint(), w.bus, w.clock);
  REQUIRE(agent.start());
  for (const char* junk : {"", "{}", "[1,2]", R"({"device_id":"zz","totp_code":"123456","manufacturer_url":"x"})"}) {
    w.bus.publish("home", junk);
  }
  CHECK(agent.malformed_dropped() == 4);
  CHECK(agent.requests_sent() == 0);
}

TEST_CASE("an unreachable manufacturer is skipped") {
  World w;
  auto ghost = w.device("home");
  ghost.manufacturer_url = "https://initech.example";
  const auto phone = w.device("home");
  ClientAgent agent("alice", "home", kRp, DeliveryMode::Relayed, w.endpoint(), w.bus, w.clock);
  REQUIRE(agent.start());
  w.broadcast(ghost);
  w.broadcast(phone);
  CHECK(agent.known_status() == SessionStatus::Granted);
  const auto unreachable = w.entries("verification_response");
  REQUIRE(unreachable.size() == 1);
  CHECK(unreachable[0].from == "https://initech.example");
  CHECK(unreachable[0].result == "unreachable");
}

TEST_CASE("agents never forward devices from another scope") {
  World w;
  w.device("office");
  w.device("office");
  ClientAgent agent("alice", "home", kRp, DeliveryMode::Relayed, w.endpoint(), w.bus, w.clock);
  REQUIRE(agent.start());
  w.schedule_adverts(kT0 + 40);
  w.scheduler.at(kT0 + 30, Phase::Deadline, [&] {
    query_decision(w.endpoint(), agent.actor(), kRp, agent.offer()->session_token);
  });
  w.scheduler.run_until(kT0 + 40);
  CHECK(agent.requests_sent() == 0);
  CHECK(w.entries("verification_request").empty());
  CHECK(w.rp.session_decision(agent.offer()->session_token, w.clock.now()).status == SessionStatus::Denied);
}

TEST_CASE("direct delivery reaches the same decision as relayed") {
  for (const auto mode : {DeliveryMode::Relayed, DeliveryMode::Direct}) {
    TrustPolicy p;
    p.threshold = 200;
    World w(p);
    w.device("home");
    w.device("home", -30);
    ClientAgent agent("alice", "home", kRp, mode, w.endpoint(), w.bus, w.clock);
    REQUIRE(agent.start());
    w.schedule_adverts(kT0 + 10);
    w.scheduler.run_until(kT0 + 10);
    const auto d = w.rp.session_decision(agent.offer()->session_token, w.clock.now());
    CHECK(d.status == SessionStatus::Granted);
    CHECK(d.total_trust == 200);
    const auto deliveries = w.entries("trust_voucher");
    const auto by_agent = std::count_if(deliveries.begin(), deliveries.end(), [](const LedgerEntry& e) {
      return e.from == "agent:alice" && e.result == "delivered";
    });
    const auto by_maker = std::count_if(deliveries.begin(), deliveries.end(), [](const LedgerEntry& e) {
      return e.from == kAcme && e.result == "delivered";
    });
    CHECK(by_agent == (mode == DeliveryMode::Relayed ? 2 : 0));
    CHECK(by_maker == (mode == DeliveryMode::Direct ? 2 : 0));
  }
}

TEST_CASE("adversary scripts") {
  SUBCASE("a replayer's resubmissions are refused") {
    World w;
    const auto phone = w.device("home");
    ClientAgent alice("alice", "home", kRp, DeliveryMode::Relayed, w.endpoint(), w.bus, w.clock);
    REQUIRE(alice.start());
    Adversary eve({.name = "eve", .kind = AdversaryKind::Replayer, .scope = "home", .harvest_window_s = 0},
                  w.scheduler, w.endpoint(), w.bus, kRp, 5, [](const std::string&) { return std::nullopt; });
    REQUIRE(eve.open_session());
    eve.start();
    w.scheduler.at(kT0, Phase::Advertise, [&] { w.broadcast(phone); });
    w.scheduler.run_until(kT0 + 80);

    CHECK(alice.known_status() == SessionStatus::Granted);
    std::vector<std::string> reasons;
    for (const auto& ev : eve.trace()) {
      CHECK(ev.action == "redeem");
      CHECK(ev.result == "rejected");
      reasons.push_back(ev.reason);
    }
    CHECK(reasons == std::vector<std::string>{"replayed_code", "replayed_code", "bad_totp"});
  }

  SUBCASE("a miner beats the victim to a fresh code") {
    World w;
    const auto phone = w.device("home");
    Adversary mallory({.name = "mallory", .kind = AdversaryKind::Miner, .scope = "home", .harvest_window_s = 10},
                      w.scheduler, w.endpoint(), w.bus, kRp, 6, [](const std::string&) { return std::nullopt; });
    REQUIRE(mallory.open_session());
    mallory.start();
    ClientAgent alice("alice", "home", kRp, DeliveryMode::Relayed, w.endpoint(), w.bus, w.clock);
    w.scheduler.at(kT0 + 2, Phase::SessionOpen, [&] { alice.start(); });
    w.schedule_adverts(kT0 + 20);
    w.scheduler.run_until(kT0 + 20);

    REQUIRE_FALSE(mallory.trace().empty());
    CHECK(mallory.trace()[0].result == "voucher");
    CHECK(mallory.trace()[0].session == mallory.offer()->session_token.str());
    CHECK(mallory.trace()[0].trust == 100);
    CHECK(w.rp.session_decision(mallory.offer()->session_token, w.clock.now()).status == SessionStatus::Granted);

    const auto refusals = w.entries("verification_rejection");
    REQUIRE_FALSE(refusals.empty());
    CHECK(refusals[0].to == "agent:alice");
    CHECK(refusals[0].reason == "rate_limited");
  }

  SUBCASE("an eater burns a device every 10 s for 60 s") {
    World w;
    const auto phone = w.device("home");
    Adversary eve({.name = "eve", .kind = AdversaryKind::Eater, .scope = "home", .period_s = 10, .run_for_s = 60,
                   .target_device = phone.device_id},
                  w.scheduler, w.endpoint(), w.bus, kRp, 7, [](const std::string&) { return std::nullopt; });
    eve.start();
    w.schedule_adverts(kT0 + 60);
    w.scheduler.run_until(kT0 + 60);

    const std::vector<int> full{100, 50, 33, 25, 20, 16, 14};
    std::vector<int> trusts;
    std::size_t redeems = 0;
    for (const auto& ev : eve.trace()) {
      CHECK(ev.action == "redeem");
      ++redeems;
      if (ev.result == "voucher") {
        trusts.push_back(*ev.trust);
      } else {
        CHECK((ev.reason == "rate_limited" || ev.reason == "replayed_code"));
      }
    }
    CHECK(redeems == 7);
    CHECK(trusts.size() <= 7);
    CHECK(std::equal(trusts.begin(), trusts.end(), full.begin()));
    CHECK(w.acme.registry_lookup(phone.device_id)->usage.success_count == trusts.size());
  }
}

TEST_CASE("no device secret ever crosses the bus or the wire") {
  World w;
  std::vector<std::string> overheard;
  w.bus.subscribe("home", [&](const std::string& m) { overheard.push_back(m); });
  w.device("home");
  w.device("home", -30);
  w.device("home");
  ClientAgent alice("alice", "home", kRp, DeliveryMode::Relayed, w.endpoint(), w.bus, w.clock);
  ClientAgent bob("bob", "home", kRp, DeliveryMode::Direct, w.endpoint(), w.bus, w.clock);
  Adversary mallory({.name = "mallory", .kind = AdversaryKind::Miner, .scope = "home", .harvest_window_s = 60,
                     .targets = {"self", "alice"}},
                    w.scheduler, w.endpoint(), w.bus, kRp, 8, [&](const std::string& who) -> std::optional<SessionToken> {
                      if (who == "alice" && alice.offer()) return alice.offer()->session_token;
                      return std::nullopt;
                    });
  Adversary eve({.name = "eve", .kind = AdversaryKind::Eater, .scope = "home"}, w.scheduler, w.endpoint(), w.bus,
                kRp, 9, [](const std::string&) { return std::nullopt; });
  Adversary rex({.name = "rex", .kind = AdversaryKind::Replayer, .scope = "home"}, w.scheduler, w.endpoint(), w.bus,
                kRp, 10, [](const std::string&) { return std::nullopt; });
  mallory.open_session();
  rex.open_session();
  mallory.start();
  eve.start();
  rex.start();
  w.scheduler.at(kT0 + 3, Phase::SessionOpen, [&] { alice.start(); });
  w.scheduler.at(kT0 + 33, Phase::SessionOpen, [&] { bob.start(); });
  w.schedule_adverts(kT0 + 90);
  w.scheduler.run_until(kT0 + 90);

  std::vector<std::string> all = overheard;
  all.insert(all.end(), w.transport.traffic.begin(), w.transport.traffic.end());
  all.insert(all.end(), w.direct.traffic.begin(), w.direct.traffic.end());
  REQUIRE(all.size() > 40);
  for (const auto& d : w.devices) {
    const auto& raw = d.secret.key();
    const std::string bytes(raw.begin(), raw.end());
    const std::string needles[] = {d.secret.str(), hex_encode(raw), bytes};
    for (const auto& msg : all) {
      for (const auto& needle : needles) CHECK(msg.find(needle) == std::string::npos);
    }
  }
}
