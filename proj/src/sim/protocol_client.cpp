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

#include "trustware/sim/protocol_client.hpp"

#include "trustware/wire.hpp"

namespace trustware::sim {

std::string voucher_fingerprint(const TrustVoucher& voucher) {
  return hex_encode(std::span(voucher.signature).first(8));
}

namespace {

LedgerEntry unreachable(const std::string& from, const std::string& to, const std::string& kind) {
  LedgerEntry e;
  e.from = from;
  e.to = to;
  e.kind = kind;
  e.result = "unreachable";
  return e;
}

}  // namespace

std::optional<SessionOffer> request_session(Endpoint ep, const std::string& actor,
                                            const std::string& rp_url) {
  HttpRequest req;
  req.method = "POST";
  req.path = "/session";
  const auto res = ep.transport.send(rp_url, req);
  if (res.status != 200) {
    ep.ledger.record(unreachable(rp_url, actor, "session_offer"));
    return std::nullopt;
  }
  try {
    auto offer = decode_as<SessionOffer>(res.body);
    ep.ledger.record({.from = rp_url,
                      .to = actor,
                      .kind = "session_offer",
                      .session = offer.session_token.str(),
                      .result = "ok",
                      .bytes = res.body.size()});
    return offer;
  } catch (const Error&) {
    ep.ledger.record({.from = rp_url, .to = actor, .kind = "session_offer", .result = "malformed"});
    return std::nullopt;
  }
}

std::optional<VerificationOutcome> request_verification(
    Endpoint ep, const std::string& actor, const std::string& manufacturer_url,
    const VerificationRequest& request, const std::optional<std::string>& deliver_to) {
  HttpRequest req;
  req.method = "POST";
  req.path = "/verify";
  req.body = encode_message(request);
  if (deliver_to) req.query["deliver_to"] = *deliver_to;
  ep.ledger.record({.from = actor,
                    .to = manufacturer_url,
                    .kind = "verification_request",
                    .session = request.session_token.str(),
                    .device = request.device_id.str(),
                    .result = deliver_to ? "direct" : "relayed",
                    .bytes = req.body.size()});

  const auto res = ep.transport.send(manufacturer_url, req);
  try {
    if (res.status == 200) {
      auto voucher = decode_as<TrustVoucher>(res.body);
      ep.ledger.record({.from = manufacturer_url,
                        .to = actor,
                        .kind = "trust_voucher",
                        .session = voucher.session_token.str(),
                        .device = voucher.device_id.str(),
                        .voucher = voucher_fingerprint(voucher),
                        .trust = voucher.trust,
                        .result = "issued",
                        .bytes = res.body.size()});
      return voucher;
    }
    if (res.status == 403 || res.status == 400) {
      auto rejection = decode_as<VerificationRejection>(res.body);
      ep.ledger.record({.from = manufacturer_url,
                        .to = actor,
                        .kind = "verification_rejection",
                        .session = request.session_token.str(),
                        .device = rejection.device_id.str(),
                        .result = "rejected",
                        .reason = std::string(to_string(rejection.reason)),
                        .bytes = res.body.size()});
      return rejection;
    }
  } catch (const Error&) {
  }
  ep.ledger.record(unreachable(manufacturer_url, actor, "verification_response"));
  return std::nullopt;
}

std::optional<DeliveryOutcome> deliver_voucher(Endpoint ep, const std::string& actor,
                                               const std::string& rp_url,
                                               const TrustVoucher& voucher,
                                               const std::optional<SessionToken>& target) {
  HttpRequest req;
  req.method = "POST";
  req.path = "/voucher";
  req.body = encode_message(voucher);
  if (target) req.query["token"] = target->str();
  const auto session = (target ? *target : voucher.session_token).str();
  ep.ledger.record({.from = actor,
                    .to = rp_url,
                    .kind = "trust_voucher",
                    .session = session,
                    .device = voucher.device_id.str(),
                    .voucher = voucher_fingerprint(voucher),
                    .trust = voucher.trust,
                    .result = "delivered",
                    .bytes = req.body.size()});

  const auto res = ep.transport.send(rp_url, req);
  try {
    if (res.status == 200) {
      auto decision = decode_as<Decision>(res.body);
      ep.ledger.record({.from = rp_url,
                        .to = actor,
                        .kind = "decision",
                        .session = session,
                        .device = voucher.device_id.str(),
                        .voucher = voucher_fingerprint(voucher),
                        .trust = voucher.trust,
                        .result = "accepted",
                        .reason = std::string(to_string(decision.status)),
                        .bytes = res.body.size()});
      return decision;
    }
    if (res.status == 403 || res.status == 400) {
      auto rejection = decode_as<VerificationRejection>(res.body);
      ep.ledger.record({.from = rp_url,
                        .to = actor,
                        .kind = "verification_rejection",
                        .session = session,
                        .device = voucher.device_id.str(),
                        .voucher = voucher_fingerprint(voucher),
                        .result = "rejected",
                        .reason = std::string(to_string(rejection.reason)),
                        .bytes = res.body.size()});
      return rejection.reason;
    }
  } catch (const Error&) {
  }
  ep.ledger.record(unreachable(rp_url, actor, "delivery_response"));
  return std::nullopt;
}

std::optional<Decision> query_decision(Endpoint ep, const std::string& actor,
                                       const std::string& rp_url, const SessionToken& token) {
  HttpRequest req;
  req.method = "GET";
  req.path = "/decision";
  req.query["token"] = token.str();
  const auto res = ep.transport.send(rp_url, req);
  if (res.status == 200) {
    try {
      auto decision = decode_as<Decision>(res.body);
      ep.ledger.record({.from = rp_url,
                        .to = actor,
                        .kind = "decision",
                        .session = token.str(),
                        .result = std::string(to_string(decision.status)),
                        .bytes = res.body.size()});
      return decision;
    } catch (const Error&) {
    }
  }
  ep.ledger.record(unreachable(rp_url, actor, "decision"));
  return std::nullopt;
}

}  // namespace trustware::sim
