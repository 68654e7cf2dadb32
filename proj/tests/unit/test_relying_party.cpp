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
#include <atomic>
#include <numeric>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "trustware/error.hpp"
#include "trustware/relying_party.hpp"
#include "trustware/wire.hpp"

using namespace trustware;

namespace {

constexpr UnixSeconds kT0 = 1700000010;

SigningKey key_for(const std::string& name) {
  Rng rng(derive_seed(11, name));
  return SigningKey::generate(rng);
}

ManufacturerRegistry registry_of(std::initializer_list<const char*> names) {
  ManufacturerRegistry reg;
  for (const char* n : names) reg.add(ManufacturerName::parse(n), key_for(n).public_key());
  return reg;
}

TrustVoucher mint(const SessionToken& token, const DeviceId& device, int trust, UnixSeconds at,
                  const std::string& maker = "acme") {
  return sign_voucher({token, device, trust, at, ManufacturerName::parse(maker), {}}, key_for(maker));
}

RelyingParty make_rp(TrustPolicy policy = {}) {
  return RelyingParty("https://rp.example", registry_of({"acme", "globex"}), policy, 5);
}

std::optional<RejectReason> reason_of(const AcceptOutcome& out) {
  if (const auto* r = std::get_if<RejectReason>(&out)) return *r;
  return std::nullopt;
}

}  // namespace

TEST_CASE("open_session") {
  auto rp = make_rp();
  const auto a = rp.open_session(kT0);
  const auto b = rp.open_session(kT0);
  CHECK(a.session_token != b.session_token);
  CHECK(a.expires_at - kT0 == 30);
  CHECK(a.min_trust == 100);
  CHECK(a.relying_party_url == "https://rp.example");
  CHECK(encode_message(a).size() < 1024);
  CHECK(rp.session_decision(a.session_token, kT0).status == SessionStatus::Pending);

  TrustPolicy p;
  p.threshold = 250;
  p.session_timeout_s = 120;
  const auto c = rp.open_session(p, kT0);
  CHECK(c.min_trust == 250);
  CHECK(c.expires_at == kT0 + 120);
  p.threshold = 0;
  CHECK_THROWS_AS(rp.open_session(p, kT0), Error);
}

TEST_CASE("accept_voucher examples") {
  auto rp = make_rp();
  Rng rng(1);
  const auto a = rp.open_session(kT0).session_token;
  const auto b = rp.open_session(kT0).session_token;

  SUBCASE("valid voucher into an empty session") {
    const auto out = rp.accept_voucher(a, mint(a, DeviceId::random(rng), 100, kT0), kT0 + 1);
    REQUIRE(std::holds_alternative<VoucherAccepted>(out));
    CHECK(std::get<VoucherAccepted>(out).total_trust == 100);
    CHECK(std::get<VoucherAccepted>(out).status == SessionStatus::Granted);
    CHECK(rp.snapshot(a)->decided_at == kT0 + 1);
  }
  SUBCASE("unknown manufacturer") {
    auto rogue = mint(a, DeviceId::random(rng), 100, kT0, "initech");
    CHECK(reason_of(rp.accept_voucher(a, rogue, kT0)) == RejectReason::UnknownManufacturer);
    // A known name signed by the wrong key is a bad signature.
    auto forged = sign_voucher({a, DeviceId::random(rng), 100, kT0, ManufacturerName::parse("acme"), {}},
                               key_for("initech"));
    CHECK(reason_of(rp.accept_voucher(a, forged, kT0)) == RejectReason::BadSignature);
  }
  SUBCASE("token binding") {
    const auto v = mint(a, DeviceId::random(rng), 100, kT0);
    CHECK(reason_of(rp.accept_voucher(b, v, kT0)) == RejectReason::TokenMismatch);
    CHECK(rp.snapshot(b)->total_trust == 0);
    CHECK(std::holds_alternative<VoucherAccepted>(rp.accept_voucher(a, v, kT0)));
  }
  SUBCASE("freshness boundary") {
    const auto dev = DeviceId::random(rng);
    TrustPolicy p;
    p.session_timeout_s = 200;
    const auto s = rp.open_session(p, kT0).session_token;
    CHECK(reason_of(rp.accept_voucher(s, mint(s, dev, 10, kT0), kT0 + 61)) == RejectReason::StaleVoucher);
    CHECK(std::holds_alternative<VoucherAccepted>(rp.accept_voucher(s, mint(s, dev, 10, kT0), kT0 + 60)));
  }
  SUBCASE("duplicate device and byte-identical redelivery") {
    const auto dev = DeviceId::random(rng);
    const auto v = mint(a, dev, 40, kT0);
    CHECK(std::holds_alternative<VoucherAccepted>(rp.accept_voucher(a, v, kT0)));
    CHECK(reason_of(rp.accept_voucher(a, v, kT0)) == RejectReason::DuplicateDevice);
    CHECK(reason_of(rp.accept_voucher(a, mint(a, dev, 40, kT0 + 15), kT0 + 15)) ==
          RejectReason::DuplicateDevice);
    CHECK(rp.snapshot(a)->total_trust == 40);
  }
  SUBCASE("unknown session") {
    const auto ghost = SessionToken::random(rng);
    CHECK(reason_of(rp.accept_voucher(ghost, mint(ghost, DeviceId::random(rng), 1, kT0), kT0)) ==
          RejectReason::UnknownSession);
    CHECK_THROWS_AS(rp.session_decision(ghost, kT0), Error);
  }
}

TEST_CASE("session_decision boundaries") {
  Rng rng(2);
  auto rp = make_rp();
  const auto s = rp.open_session(kT0).session_token;
  REQUIRE(std::holds_alternative<VoucherAccepted>(rp.accept_voucher(s, mint(s, DeviceId::random(rng), 40, kT0), kT0)));
  CHECK(rp.session_decision(s, kT0 + 5).status == SessionStatus::Pending);
  CHECK(rp.session_decision(s, kT0 + 29).status == SessionStatus::Pending);
  const auto d = rp.session_decision(s, kT0 + 31);
  CHECK(d.status == SessionStatus::Denied);
  CHECK(d.total_trust == 40);
  CHECK(rp.snapshot(s)->decided_at == kT0 + 30);

  const auto exact = rp.open_session(kT0).session_token;
  CHECK(rp.session_decision(exact, kT0 + 30).status == SessionStatus::Denied);

  const auto inclusive = rp.open_session(kT0).session_token;
  rp.accept_voucher(inclusive, mint(inclusive, DeviceId::random(rng), 60, kT0), kT0);
  const auto out = rp.accept_voucher(inclusive, mint(inclusive, DeviceId::random(rng), 40, kT0), kT0 + 2);
  REQUIRE(std::holds_alternative<VoucherAccepted>(out));
  CHECK(std::get<VoucherAccepted>(out).status == SessionStatus::Granted);
  CHECK(rp.session_decision(inclusive, kT0 + 2).total_trust == 100);
}

TEST_CASE("a voucher arriving at the deadline finds the session closed") {
  Rng rng(3);
  auto rp = make_rp();
  const auto s = rp.open_session(kT0).session_token;
  CHECK(reason_of(rp.accept_voucher(s, mint(s, DeviceId::random(rng), 100, kT0 + 29), kT0 + 30)) ==
        RejectReason::SessionClosed);
  CHECK(rp.session_decision(s, kT0 + 30).status == SessionStatus::Denied);
}

TEST_CASE("decisions are final") {
  Rng rng(4);
  auto rp = make_rp();
  const auto g = rp.open_session(kT0).session_token;
  rp.accept_voucher(g, mint(g, DeviceId::random(rng), 100, kT0), kT0 + 1);
  CHECK(reason_of(rp.accept_voucher(g, mint(g, DeviceId::random(rng), 100, kT0 + 2), kT0 + 2)) ==
        RejectReason::SessionClosed);
  CHECK(rp.session_decision(g, kT0 + 1000).status == SessionStatus::Granted);
  CHECK(rp.session_decision(g, kT0 + 1000).total_trust == 100);

  const auto d = rp.open_session(kT0).session_token;
  CHECK(rp.session_decision(d, kT0 + 45).status == SessionStatus::Denied);
  CHECK(reason_of(rp.accept_voucher(d, mint(d, DeviceId::random(rng), 100, kT0 + 45), kT0 + 45)) ==
        RejectReason::SessionClosed);
  CHECK(rp.session_decision(d, kT0 + 46).status == SessionStatus::Denied);
}

TEST_CASE("registry loading") {
  const auto a = hex_encode(key_for("acme").public_key());
  const auto g = hex_encode(key_for("globex").public_key());
  {
    std::istringstream in("# trusted\nacme," + a + "\n\nglobex," + g + "\r\n");
    const auto reg = ManufacturerRegistry::load(in);
    CHECK(reg.size() == 2);
    CHECK(reg.find(ManufacturerName::parse("acme")) != nullptr);
    CHECK(*reg.find(ManufacturerName::parse("globex")) == key_for("globex").public_key());
    std::istringstream again(reg.to_text());
    CHECK(ManufacturerRegistry::load(again).entries() == reg.entries());
  }
  {
    std::istringstream empty("");
    CHECK(ManufacturerRegistry::load(empty).size() == 0);
  }
  for (const std::string& bad : std::vector<std::string>{"acme," + a + "\nacme," + g + "\n", "acme\n", "acme," + a + ",x\n",
                                "Acme," + a + "\n", "acme," + a.substr(2) + "\n", "acme,zz" + a.substr(2) + "\n"}) {
    std::istringstream in(bad);
    try {
      ManufacturerRegistry::load(in);
      FAIL("expected MalformedRegistry: " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MalformedRegistry);
    }
  }
  CHECK_THROWS_AS(ManufacturerRegistry::load_file("/nonexistent/registry.txt"), Error);
}

TEST_CASE("an empty registry rejects every voucher") {
  Rng rng(5);
  RelyingParty rp("https://rp.example", ManufacturerRegistry{}, TrustPolicy{}, 1);
  const auto s = rp.open_session(kT0).session_token;
  for (const char* maker : {"acme", "globex", "initech"}) {
    CHECK(reason_of(rp.accept_voucher(s, mint(s, DeviceId::random(rng), 100, kT0, maker), kT0)) ==
          RejectReason::UnknownManufacturer);
  }
}

TEST_CASE("random delivery schedules keep the session invariants") {
  Rng rng(77);
  for (int round = 0; round < 60; ++round) {
    TrustPolicy p;
    p.threshold = 50 + static_cast<std::int64_t>(rng.next() % 300);
    p.session_timeout_s = 20 + static_cast<std::int64_t>(rng.next() % 60);
    auto rp = make_rp(p);
    std::vector<SessionToken> sessions;
    for (int i = 0; i < 4; ++i) sessions.push_back(rp.open_session(kT0).session_token);
    std::vector<DeviceId> devices;
    for (int i = 0; i < 6; ++i) devices.push_back(DeviceId::random(rng));

    // A pool of vouchers, some tampered, some for a foreign maker, that is
    // then delivered in random order with duplication to random sessions.
    std::vector<TrustVoucher> pool;
    for (int i = 0; i < 40; ++i) {
      const auto& token = sessions[rng.next() % sessions.size()];
      auto v = mint(token, devices[rng.next() % devices.size()], static_cast<int>(rng.next() % 101),
                    kT0 + static_cast<std::int64_t>(rng.next() % 40), rng.next() % 5 == 0 ? "globex" : "acme");
      if (rng.next() % 7 == 0) v.trust = (v.trust + 1) % 101;
      if (rng.next() % 11 == 0) v = mint(token, v.device_id, v.trust, v.issued_at, "initech");
      pool.push_back(v);
    }

    std::map<SessionToken, SessionStatus> last_status;
    std::map<SessionToken, std::vector<TrustVoucher>> accepted;
    UnixSeconds now = kT0;
    for (int step = 0; step < 120; ++step) {
      now += static_cast<std::int64_t>(rng.next() % 3);
      const auto& v = pool[rng.next() % pool.size()];
      const auto& target = rng.next() % 3 == 0 ? sessions[rng.next() % sessions.size()] : v.session_token;
      const auto before = *rp.snapshot(target);
      const auto out = rp.accept_voucher(target, v, now);
      const auto after = *rp.snapshot(target);

      if (std::holds_alternative<VoucherAccepted>(out)) {
        CHECK(v.session_token == target);
        CHECK(before.status == SessionStatus::Pending);
        CHECK(verify_voucher(v, *rp.registry().find(v.manufacturer_name)));
        CHECK(now - v.issued_at <= p.voucher_freshness_s);
        CHECK_FALSE(before.contributing_devices.contains(v.device_id));
        CHECK(after.total_trust == before.total_trust + v.trust);
        accepted[target].push_back(v);
      } else {
        CHECK(after.total_trust == before.total_trust);
        CHECK(after.contributing_devices == before.contributing_devices);
      }
      for (const auto& s : sessions) {
        const auto snap = *rp.snapshot(s);
        const auto& acc = snap.accepted;
        CHECK(snap.total_trust == std::accumulate(acc.begin(), acc.end(), std::int64_t{0},
                                                  [](std::int64_t sum, const TrustVoucher& x) { return sum + x.trust; }));
        CHECK(snap.contributing_devices.size() == acc.size());
        for (const auto& x : acc) CHECK(x.session_token == s);
        if (snap.status == SessionStatus::Granted) CHECK(snap.total_trust >= p.threshold);
        const auto prev = last_status.find(s);
        if (prev != last_status.end() && prev->second != SessionStatus::Pending) {
          CHECK(snap.status == prev->second);
        }
        last_status[s] = snap.status;
      }
    }
    for (const auto& [token, vs] : accepted) CHECK(rp.snapshot(token)->accepted == vs);
  }
}

TEST_CASE("concurrent deliveries neither lose updates nor double grant") {
  TrustPolicy p;
  p.threshold = 10'000;
  auto rp = make_rp(p);
  Rng rng(6);
  const auto s = rp.open_session(kT0).session_token;
  std::vector<TrustVoucher> vouchers;
  for (int i = 0; i < 64; ++i) vouchers.push_back(mint(s, DeviceId::random(rng), 1 + i % 50, kT0));
  std::int64_t expected = 0;
  for (const auto& v : vouchers) expected += v.trust;

  std::atomic<int> accepted{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t) {
    pool.emplace_back([&, t] {
      // Every thread delivers every voucher; each device must land once.
      for (std::size_t i = 0; i < vouchers.size(); ++i) {
        const auto& v = vouchers[(i + static_cast<std::size_t>(t) * 7) % vouchers.size()];
        if (std::holds_alternative<VoucherAccepted>(rp.accept_voucher(s, v, kT0 + 1))) ++accepted;
      }
    });
  }
  for (auto& th : pool) th.join();
  CHECK(accepted == 64);
  CHECK(rp.snapshot(s)->total_trust == expected);

  p.threshold = 100;
  auto rp2 = make_rp(p);
  const auto g = rp2.open_session(kT0).session_token;
  std::vector<TrustVoucher> big;
  for (int i = 0; i < 32; ++i) big.push_back(mint(g, DeviceId::random(rng), 100, kT0));
  std::atomic<int> grants{0};
  std::vector<std::thread> racers;
  for (int t = 0; t < 8; ++t) {
    racers.emplace_back([&, t] {
      for (int i = t; i < 32; i += 8) {
        const auto out = rp2.accept_voucher(g, big[static_cast<std::size_t>(i)], kT0 + 1);
        if (const auto* a = std::get_if<VoucherAccepted>(&out); a && a->status == SessionStatus::Granted) ++grants;
      }
    });
  }
  for (auto& th : racers) th.join();
  CHECK(grants == 1);
  CHECK(rp2.snapshot(g)->total_trust == 100);
}
