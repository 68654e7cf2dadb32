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
#include <memory>
#include <sstream>

#include "trustware/service.hpp"
#include "trustware/sim/scenario.hpp"
#include "trustware/sim/scheduler.hpp"
#include "trustware/wire.hpp"

namespace trustware::sim {
namespace {

struct ManufacturerRuntime {
  std::unique_ptr<ManufacturerServer> server;
  std::unique_ptr<ManufacturerService> service;
};

struct Participant {
  std::string name;
  std::string actor;
  SessionToken token;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

ScenarioReport run_once(const ScenarioConfig& config, DeliveryMode mode) {
  const bool real = config.clock == ClockMode::Real;
  const UnixSeconds start = real ? SystemClock().now() : config.start;
  const UnixSeconds end = start + config.duration_s;

  VirtualClock clock(start);
  Scheduler scheduler(clock, real);
  Ledger ledger(clock);
  AdvertisementBus bus;

  // Manufacturers and their device fleets.
  std::vector<ManufacturerRuntime> manufacturers;
  std::map<std::string, std::size_t> manufacturer_index;
  for (const auto& m : config.manufacturers) {
    Rng key_rng(derive_seed(config.seed, "manufacturer:" + m.name));
    ManufacturerIdentity identity{ManufacturerName::parse(m.name), m.url, SigningKey::generate(key_rng)};
    manufacturer_index[m.name] = manufacturers.size();
    manufacturers.push_back({std::make_unique<ManufacturerServer>(
                                 std::move(identity), TrustHeuristic::parse(m.heuristic, m.rate_limit_s),
                                 m.skew_intervals, std::make_unique<DeviceRegistry>()),
                             nullptr});
  }

  std::vector<EmulatedDevice> devices;
  std::map<std::string, DeviceId> device_ids;
  for (const auto& d : config.devices) {
    auto& server = *manufacturers[manufacturer_index.at(d.manufacturer)].server;
    Rng device_rng(derive_seed(config.seed, "device:" + d.name));
    const auto record = server.provision_device(device_rng, start);
    device_ids.emplace(d.name, record.device_id);
    devices.push_back({record.device_id, record.secret, server.identity().url, d.clock_offset_s,
                       d.behavior, d.scope});
  }

  ManufacturerRegistry registry;
  for (const auto& m : manufacturers) {
    const auto& id = m.server->identity();
    const bool trusted = !config.trusted || std::ranges::find(*config.trusted, id.name.str()) != config.trusted->end();
    if (trusted) registry.add(id.name, id.public_key());
  }
  RelyingParty rp(config.rp_url, std::move(registry), config.policy, derive_seed(config.seed, "relying-party"));
  RelyingPartyService rp_service(rp, clock);

  // Manufacturers post direct-mode vouchers over their own client so a
  // request in flight never waits on itself.
  std::unique_ptr<Transport> transport;
  std::unique_ptr<Transport> direct_transport;
  if (config.transport == TransportKind::Http) {
    transport = std::make_unique<HttpTransport>();
    direct_transport = std::make_unique<HttpTransport>();
  } else {
    transport = std::make_unique<InProcessTransport>();
    direct_transport = std::make_unique<InProcessTransport>();
  }

  for (auto& m : manufacturers) {
    const std::string actor = m.server->identity().url;
    Transport* out = direct_transport.get();
    m.service = std::make_unique<ManufacturerService>(
        *m.server, clock,
        [out, &ledger, actor](const TrustVoucher& voucher, const std::string& rp_url) {
          deliver_voucher(Endpoint{*out, ledger}, actor, rp_url, voucher, std::nullopt);
        },
        std::nullopt, derive_seed(config.seed, "provision:" + m.server->identity().name.str()));
  }

  std::vector<std::pair<std::string, Service*>> routes{{config.rp_url, &rp_service}};
  for (auto& m : manufacturers) routes.emplace_back(m.server->identity().url, m.service.get());

  std::vector<std::unique_ptr<HttpHost>> hosts;
  if (config.transport == TransportKind::Http) {
    for (auto& [url, service] : routes) {
      hosts.push_back(std::make_unique<HttpHost>(*service, "127.0.0.1", 0));
      const int port = hosts.back()->port();
      static_cast<HttpTransport&>(*transport).route(url, "127.0.0.1", port);
      static_cast<HttpTransport&>(*direct_transport).route(url, "127.0.0.1", port);
    }
  } else {
    for (auto& [url, service] : routes) {
      static_cast<InProcessTransport&>(*transport).route(url, *service);
      static_cast<InProcessTransport&>(*direct_transport).route(url, *service);
    }
  }

  const Endpoint endpoint{*transport, ledger};
  std::vector<Participant> participants;

  auto schedule_deadline = [&](const std::string& actor, const SessionOffer& offer) {
    scheduler.at(offer.expires_at, Phase::Deadline, [&, actor, token = offer.session_token] {
      query_decision(endpoint, actor, config.rp_url, token);
    });
  };

  std::vector<std::unique_ptr<ClientAgent>> agents;
  for (const auto& a : config.agents) {
    agents.push_back(std::make_unique<ClientAgent>(a.name, a.scope, config.rp_url, mode, endpoint, bus, clock));
    ClientAgent* agent = agents.back().get();
    scheduler.at(start + a.open_at_s, Phase::SessionOpen, [&, agent] {
      if (auto offer = agent->start()) {
        participants.push_back({agent->name(), agent->actor(), offer->session_token});
        schedule_deadline(agent->actor(), *offer);
        scheduler.at(offer->expires_at, Phase::Deadline, [agent] { agent->stop(); });
      }
    });
  }

  auto resolve = [&participants](const std::string& name) -> std::optional<SessionToken> {
    for (const auto& p : participants) {
      if (p.name == name) return p.token;
    }
    return std::nullopt;
  };

  std::vector<std::unique_ptr<Adversary>> adversaries;
  for (const auto& spec : config.adversaries) {
    AdversaryScript script = spec.script;
    if (spec.target_device) script.target_device = device_ids.at(*spec.target_device);
    adversaries.push_back(std::make_unique<Adversary>(
        std::move(script), scheduler, endpoint, bus, config.rp_url,
        derive_seed(config.seed, "adversary:" + spec.script.name), resolve));
    Adversary* adv = adversaries.back().get();
    const bool open = spec.open_session;
    scheduler.at(start + spec.start_s, Phase::SessionOpen, [&, adv, open] {
      if (open) {
        if (auto offer = adv->open_session()) {
          participants.push_back({adv->script().name, adv->actor(), offer->session_token});
          schedule_deadline(adv->actor(), *offer);
        }
      }
      adv->start();
    });
  }

  for (UnixSeconds t = start; t <= end; t += config.advert_period_s) {
    scheduler.at(t, Phase::Advertise, [&, config_devices = &config.devices] {
      for (std::size_t i = 0; i < devices.size(); ++i) {
        const auto& dev = devices[i];
        if (dev.behavior != DeviceBehavior::Honest) continue;
        const auto encoded = encode_message(advertise(dev, clock.now()));
        ledger.record({.from = "device:" + (*config_devices)[i].name,
                       .to = "scope:" + dev.scope,
                       .kind = "advertisement",
                       .device = dev.device_id.str(),
                       .result = "broadcast",
                       .bytes = encoded.size()});
        bus.publish(dev.scope, encoded);
      }
    });
  }

  scheduler.run_until(end);

  // Dropping the clients closes keep-alive sockets so the hosts stop promptly.
  auto shutdown = [&] {
    transport.reset();
    direct_transport.reset();
    for (auto& h : hosts) h->stop();
  };

  ScenarioReport report;
  report.name = config.name;
  report.seed = config.seed;
  report.delivery_mode = mode;
  report.start = start;

  for (const auto& p : participants) {
    const auto decision = rp.session_decision(p.token, clock.now());
    const auto session = rp.snapshot(p.token);
    if (decision.status == SessionStatus::Pending) {
      shutdown();
      throw Error(Errc::ScenarioDeadlock,
                  "session of " + p.actor + " still pending when the schedule ran out at t=+" +
                      std::to_string(clock.now() - start) + "s with " +
                      std::to_string(scheduler.pending()) + " events left");
    }
    report.sessions.push_back({p.name, p.token.str(), decision.status, decision.total_trust,
                               session->created_at, session->decided_at});
  }

  shutdown();
  report.ledger = ledger.entries();

  for (std::size_t i = 0; i < devices.size(); ++i) {
    DeviceHistory history{config.devices[i].name, devices[i].device_id.str(), {}};
    for (const auto& e : report.ledger) {
      if (e.kind == "trust_voucher" && e.result == "issued" && e.device == history.device_id) {
        history.vouchers.push_back({e.t, e.trust.value_or(0), e.session, e.voucher});
      }
    }
    report.devices.push_back(std::move(history));
  }
  for (const auto& e : report.ledger) {
    if (e.bytes == 0) continue;
    auto& max = report.max_message_bytes[e.kind];
    max = std::max(max, e.bytes);
  }
  return report;
}

void evaluate(const ScenarioConfig& config, ScenarioReport& report) {
  for (const auto& [key, expected] : config.expectations) {
    const auto dot = key.find('.');
    const std::string check = key.substr(0, dot);
    const std::string subject = key.substr(dot + 1);
    ExpectationResult r{key, expected, "", false};

    if (check == "session" || check == "total" || check == "min_total" || check == "decided_at") {
      const auto* s = report.session(subject);
      if (s == nullptr) {
        r.observed = "no session";
      } else if (check == "session") {
        r.observed = std::string(to_string(s->status));
        r.ok = r.observed == expected;
      } else if (check == "total") {
        r.observed = std::to_string(s->total_trust);
        r.ok = r.observed == expected;
      } else if (check == "min_total") {
        r.observed = std::to_string(s->total_trust);
        try {
          r.ok = s->total_trust >= std::stoll(expected);
        } catch (const std::exception&) {
        }
      } else {
        r.observed = s->decided_at ? std::to_string(*s->decided_at - report.start) : "undecided";
        r.ok = r.observed == expected;
      }
    } else if (check == "min_rejections") {
      std::size_t n = 0;
      for (const auto& e : report.ledger) {
        if (e.kind == "verification_rejection" && e.reason == subject) ++n;
      }
      r.observed = std::to_string(n);
      try {
        r.ok = static_cast<long long>(n) >= std::stoll(expected);
      } catch (const std::exception&) {
      }
    } else {
      const auto it = std::ranges::find(report.devices, subject, &DeviceHistory::name);
      std::vector<int> trusts;
      if (it != report.devices.end()) {
        for (const auto& v : it->vouchers) trusts.push_back(v.trust);
      }
      if (check == "max_vouchers") {
        r.observed = std::to_string(trusts.size());
        try {
          r.ok = static_cast<long long>(trusts.size()) <= std::stoll(expected);
        } catch (const std::exception&) {
        }
      } else {
        r.observed = join(trusts);
        std::vector<int> want;
        try {
          for (const auto& v : split_csv(expected)) want.push_back(std::stoi(v));
          r.ok = want == trusts;
        } catch (const std::exception&) {
        }
      }
    }
    report.expectations.push_back(std::move(r));
  }
}

}  // namespace

const SessionOutcome* ScenarioReport::session(const std::string& owner) const {
  auto it = std::ranges::find(sessions, owner, &SessionOutcome::owner);
  return it == sessions.end() ? nullptr : &*it;
}

bool ScenarioReport::passed() const {
  return std::ranges::all_of(expectations, &ExpectationResult::ok);
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  ScenarioReport report = run_once(config, config.delivery_mode);
  evaluate(config, report);

  if (config.compare_modes) {
    const auto other_mode =
        config.delivery_mode == DeliveryMode::Relayed ? DeliveryMode::Direct : DeliveryMode::Relayed;
    const auto other = run_once(config, other_mode);
    for (const auto& s : report.sessions) {
      ExpectationResult r{"mode_equivalence." + s.owner,
                          std::string(to_string(s.status)) + "/" + std::to_string(s.total_trust), "", false};
      if (const auto* o = other.session(s.owner)) {
        r.observed = std::string(to_string(o->status)) + "/" + std::to_string(o->total_trust);
      } else {
        r.observed = "no session";
      }
      r.ok = r.expected == r.observed;
      report.expectations.push_back(std::move(r));
    }
    if (other.sessions.size() != report.sessions.size()) {
      report.expectations.push_back({"mode_equivalence.session_count", std::to_string(report.sessions.size()),
                                     std::to_string(other.sessions.size()), false});
    }
    report.other_mode_sessions = other.sessions;
  }
  return report;
}

}  // namespace trustware::sim
