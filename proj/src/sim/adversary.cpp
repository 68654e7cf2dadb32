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

#include "trustware/sim/adversary.hpp"

#include "trustware/wire.hpp"

namespace trustware::sim {

std::string_view to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::Replayer: return "replayer";
    case AdversaryKind::Miner: return "miner";
    case AdversaryKind::Eater: return "eater";
  }
  return "miner";
}

std::optional<AdversaryKind> parse_adversary_kind(std::string_view text) {
  if (text == "replayer") return AdversaryKind::Replayer;
  if (text == "miner") return AdversaryKind::Miner;
  if (text == "eater") return AdversaryKind::Eater;
  return std::nullopt;
}

Adversary::Adversary(AdversaryScript script, Scheduler& scheduler, Endpoint endpoint,
                     AdvertisementBus& bus, std::string rp_url, std::uint64_t seed,
                     TokenResolver resolve)
    : script_(std::move(script)),
      actor_("adversary:" + script_.name),
      scheduler_(scheduler),
      endpoint_(endpoint),
      bus_(bus),
      rp_url_(std::move(rp_url)),
      rng_(seed),
      resolve_(std::move(resolve)) {}

Adversary::~Adversary() {
  if (subscription_) bus_.unsubscribe(*subscription_);
}

std::optional<SessionOffer> Adversary::open_session() {
  offer_ = request_session(endpoint_, actor_, rp_url_);
  return offer_;
}

void Adversary::start() {
  started_at_ = scheduler_.now();
  subscription_ = bus_.subscribe(script_.scope, [this](const std::string& ad) { on_advertisement(ad); });
  if (script_.kind == AdversaryKind::Eater) {
    for (std::int64_t t = 0; t <= script_.run_for_s; t += script_.period_s) {
      scheduler_.at(started_at_ + t, Phase::Adversary, [this] { eat(); });
    }
  }
}

SessionToken Adversary::request_token() {
  // Eaters and session-less replayers still need a well-formed token.
  return offer_ ? offer_->session_token : new_session_token(rng_);
}

void Adversary::on_advertisement(const std::string& encoded) {
  Advertisement ad{DeviceId::parse("0000000000000000"), TotpCode::parse("000000"), "-"};
  try {
    ad = decode_as<Advertisement>(encoded);
  } catch (const Error&) {
    return;
  }
  if (script_.target_device && ad.device_id != *script_.target_device) return;
  latest_.insert_or_assign(ad.device_id, ad);

  const bool harvesting = scheduler_.now() <= started_at_ + script_.harvest_window_s;
  if (!harvesting || !seen_codes_.insert({ad.device_id, ad.totp_code}).second) return;

  switch (script_.kind) {
    case AdversaryKind::Miner:
      redeem(ad, true);
      break;
    case AdversaryKind::Replayer:
      for (auto delay : script_.replay_delays_s) {
        scheduler_.after(delay, Phase::Adversary, [this, ad] { redeem(ad, true); });
      }
      break;
    case AdversaryKind::Eater:
      break;
  }
}

void Adversary::redeem(const Advertisement& ad, bool deliver_voucher_after) {
  const VerificationRequest req{ad.device_id, ad.totp_code, request_token()};
  const auto outcome = request_verification(endpoint_, actor_, ad.manufacturer_url, req, std::nullopt);

  AttackEvent ev{scheduler_.now(), "redeem", ad.device_id.str(), req.session_token.str(), "unreachable", "", {}};
  if (outcome) {
    if (const auto* v = std::get_if<TrustVoucher>(&*outcome)) {
      ev.result = "voucher";
      ev.trust = v->trust;
      if (deliver_voucher_after && offer_) {
        const TrustVoucher voucher = *v;
        scheduler_.after(script_.kind == AdversaryKind::Miner ? script_.deliver_delay_s : 0,
                         Phase::Delivery, [this, voucher] { deliver(voucher); });
      }
    } else {
      ev.result = "rejected";
      ev.reason = std::string(to_string(std::get<VerificationRejection>(*outcome).reason));
    }
  }
  trace_.push_back(std::move(ev));
}

void Adversary::deliver(const TrustVoucher& voucher) {
  std::vector<SessionToken> targets;
  if (script_.kind == AdversaryKind::Miner) {
    for (const auto& name : script_.targets) {
      if (name == "self") {
        if (offer_) targets.push_back(offer_->session_token);
      } else if (auto token = resolve_(name)) {
        targets.push_back(*token);
      }
    }
  } else if (offer_) {
    targets.push_back(offer_->session_token);
  }

  for (const auto& target : targets) {
    const auto outcome = deliver_voucher(endpoint_, actor_, rp_url_, voucher, target);
    AttackEvent ev{scheduler_.now(), "deliver", voucher.device_id.str(), target.str(), "unreachable", "", voucher.trust};
    if (outcome) {
      if (const auto* d = std::get_if<Decision>(&*outcome)) {
        ev.result = "accepted";
        ev.reason = std::string(to_string(d->status));
      } else {
        ev.result = "rejected";
        ev.reason = std::string(to_string(std::get<RejectReason>(*outcome)));
      }
    }
    trace_.push_back(std::move(ev));
  }
}

void Adversary::eat() {
  // Vouchers are discarded: the point is to burn the devices' reputation.
  for (const auto& [id, ad] : latest_) redeem(ad, false);
}

}  // namespace trustware::sim
