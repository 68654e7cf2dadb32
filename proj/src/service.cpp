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

#include "trustware/service.hpp"

#include "trustware/wire.hpp"

namespace trustware {
namespace {

const DeviceId& unknown_device_id() {
  static const DeviceId id = DeviceId::parse("0000000000000000");
  return id;
}

HttpResponse reply(int status, const Message& message) { return {status, encode_message(message)}; }

HttpResponse not_found() { return {404, ""}; }

// Best effort: echo the caller's device ID in a malformed-request rejection.
DeviceId device_id_hint(const std::string& body) {
  try {
    const auto o = nlohmann::json::parse(body);
    if (auto id = DeviceId::try_parse(o.at("device_id").get<std::string>())) return *id;
  } catch (const std::exception&) {
  }
  return unknown_device_id();
}

}  // namespace

ManufacturerService::ManufacturerService(ManufacturerServer& server, const Clock& clock,
                                         DirectDelivery direct,
                                         std::optional<std::string> operator_token,
                                         std::uint64_t provision_seed)
    : server_(server),
      clock_(clock),
      direct_(std::move(direct)),
      operator_token_(std::move(operator_token)),
      provision_rng_(provision_seed) {}

HttpResponse ManufacturerService::handle(const HttpRequest& request) {
  if (request.method == "POST" && request.path == "/verify") return verify(request);
  if (request.method == "POST" && request.path == "/provision") return provision(request);
  return not_found();
}

HttpResponse ManufacturerService::verify(const HttpRequest& request) {
  VerificationRequest req{unknown_device_id(), TotpCode::parse("000000"), SessionToken::parse(std::string(32, '0'))};
  try {
    req = decode_as<VerificationRequest>(request.body);
  } catch (const Error&) {
    return reply(400, VerificationRejection{device_id_hint(request.body), RejectReason::MalformedRequest});
  }

  auto outcome = server_.handle_verification(req, clock_.now());
  if (const auto* voucher = std::get_if<TrustVoucher>(&outcome)) {
    if (auto it = request.query.find("deliver_to"); it != request.query.end() && direct_) {
      direct_(*voucher, it->second);
    }
    return reply(200, *voucher);
  }
  return reply(403, std::get<VerificationRejection>(outcome));
}

HttpResponse ManufacturerService::provision(const HttpRequest& request) {
  auto auth = request.headers.find("Authorization");
  if (!operator_token_ || auth == request.headers.end() ||
      auth->second != "Bearer " + *operator_token_) {
    return {403, ""};
  }
  DeviceRecord rec = [&] {
    std::lock_guard lock(rng_mutex_);
    return server_.provision_device(provision_rng_, clock_.now());
  }();
  return {200, canonical_dump({{"device_id", rec.device_id.str()},
                               {"secret", rec.secret.str()},
                               {"manufacturer_url", server_.identity().url}})};
}

HttpResponse RelyingPartyService::handle(const HttpRequest& request) {
  const auto now = clock_.now();

  if (request.method == "POST" && request.path == "/session") {
    return reply(200, rp_.open_session(now));
  }

  if (request.method == "POST" && request.path == "/voucher") {
    TrustVoucher voucher{SessionToken::parse(std::string(32, '0')), unknown_device_id(), 0, 0,
                         ManufacturerName::parse("unknown"), {}};
    try {
      voucher = decode_as<TrustVoucher>(request.body);
    } catch (const Error&) {
      return reply(400, VerificationRejection{device_id_hint(request.body),
                                              RejectReason::MalformedRequest});
    }
    SessionToken target = voucher.session_token;
    if (auto it = request.query.find("token"); it != request.query.end()) {
      auto parsed = SessionToken::try_parse(it->second);
      if (!parsed) {
        return reply(400, VerificationRejection{voucher.device_id, RejectReason::MalformedRequest});
      }
      target = *parsed;
    }
    auto outcome = rp_.accept_voucher(target, voucher, now);
    if (const auto* ok = std::get_if<VoucherAccepted>(&outcome)) {
      return reply(200, Decision{target, ok->status, ok->total_trust});
    }
    return reply(403, VerificationRejection{voucher.device_id, std::get<RejectReason>(outcome)});
  }

  if (request.method == "GET" && request.path == "/decision") {
    auto it = request.query.find("token");
    if (it == request.query.end()) return {400, ""};
    auto token = SessionToken::try_parse(it->second);
    if (!token) return {400, ""};
    try {
      return reply(200, rp_.session_decision(*token, now));
    } catch (const Error& e) {
      if (e.code() == Errc::UnknownSession) return not_found();
      throw;
    }
  }
  return not_found();
}

HttpResponse InProcessTransport::send(const std::string& base_url, const HttpRequest& request) {
  auto it = routes_.find(base_url);
  if (it == routes_.end()) return {0, ""};
  return it->second->handle(request);
}

std::optional<std::pair<std::string, int>> parse_http_url(const std::string& url) {
  constexpr std::string_view scheme = "http://";
  if (!url.starts_with(scheme)) return std::nullopt;
  auto rest = std::string_view(url).substr(scheme.size());
  rest = rest.substr(0, rest.find('/'));
  const auto colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  int port = 0;
  for (char c : rest.substr(colon + 1)) {
    if (c < '0' || c > '9') return std::nullopt;
    port = port * 10 + (c - '0');
    if (port > 65535) return std::nullopt;
  }
  if (rest.size() == colon + 1) return std::nullopt;
  return std::make_pair(std::string(rest.substr(0, colon)), port);
}

}  // namespace trustware
