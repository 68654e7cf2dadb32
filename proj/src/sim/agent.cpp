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

#include "trustware/sim/agent.hpp"

#include "trustware/wire.hpp"

namespace trustware::sim {

std::string_view to_string(DeliveryMode mode) {
  return mode == DeliveryMode::Relayed ? "relayed" : "direct";
}

std::optional<DeliveryMode> parse_delivery_mode(std::string_view text) {
  if (text == "relayed") return DeliveryMode::Relayed;
  if (text == "direct") return DeliveryMode::Direct;
  return std::nullopt;
}

ClientAgent::ClientAgent(std::string name, std::string scope, std::string rp_url,
                         DeliveryMode mode, Endpoint endpoint, AdvertisementBus& bus,
                         const Clock& clock)
    : name_(std::move(name)),
      actor_("agent:" + name_),
      scope_(std::move(scope)),
      rp_url_(std::move(rp_url)),
      mode_(mode),
      endpoint_(endpoint),
      bus_(bus),
      clock_(clock) {}

ClientAgent::~ClientAgent() { stop(); }

std::optional<SessionOffer> ClientAgent::start() {
  offer_ = request_session(endpoint_, actor_, rp_url_);
  if (offer_ && !subscription_) {
    subscription_ = bus_.subscribe(scope_, [this](const std::string& ad) { on_advertisement(ad); });
  }
  return offer_;
}

void ClientAgent::stop() {
  if (subscription_) {
    bus_.unsubscribe(*subscription_);
    subscription_.reset();
  }
}

void ClientAgent::on_advertisement(const std::string& encoded) {
  if (!offer_ || finished_ || known_status_ != SessionStatus::Pending) return;
  if (clock_.now() >= offer_->expires_at) return;

  Advertisement ad{DeviceId::parse("0000000000000000"), TotpCode::parse("000000"), "-"};
  try {
    ad = decode_as<Advertisement>(encoded);
  } catch (const Error&) {
    ++malformed_dropped_;
    return;
  }

  if (auto it = attempts_.find(ad.device_id); it != attempts_.end()) {
    if (it->second.succeeded || it->second.code == ad.totp_code) return;
  }

  ++requests_sent_;
  const VerificationRequest req{ad.device_id, ad.totp_code, offer_->session_token};
  const std::optional<std::string> deliver_to =
      mode_ == DeliveryMode::Direct ? std::optional<std::string>(rp_url_) : std::nullopt;
  const auto outcome = request_verification(endpoint_, actor_, ad.manufacturer_url, req, deliver_to);

  const auto* voucher = outcome ? std::get_if<TrustVoucher>(&*outcome) : nullptr;
  attempts_.insert_or_assign(ad.device_id, Attempt{ad.totp_code, voucher != nullptr});
  if (voucher == nullptr || mode_ == DeliveryMode::Direct) return;

  const auto delivered = deliver_voucher(endpoint_, actor_, rp_url_, *voucher, offer_->session_token);
  if (delivered) {
    if (const auto* decision = std::get_if<Decision>(&*delivered)) {
      known_status_ = decision->status;
    } else if (std::get<RejectReason>(*delivered) == RejectReason::SessionClosed) {
      finished_ = true;
    }
  }
}

}  // namespace trustware::sim
