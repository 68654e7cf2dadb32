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

#include "trustware/wire.hpp"

#include <algorithm>
#include <initializer_list>
#include <limits>

namespace trustware {
namespace {

using json = nlohmann::json;

[[noreturn]] void schema(const std::string& what) { throw Error(Errc::SchemaViolation, what); }

void require_exact_keys(const json& obj, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) schema("message must be a map");
  if (obj.size() != keys.size()) schema("unexpected field count");
  for (auto key : keys) {
    if (!obj.contains(std::string(key))) schema("missing field " + std::string(key));
  }
}

const std::string& get_string(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) schema(std::string(key) + " must be a string");
  return v.get_ref<const std::string&>();
}

std::int64_t get_int(const json& obj, const char* key, std::int64_t lo, std::int64_t hi) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) schema(std::string(key) + " must be an integer");
  std::int64_t n = 0;
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      schema(std::string(key) + " out of range");
    }
    n = static_cast<std::int64_t>(u);
  } else {
    n = v.get<std::int64_t>();
  }
  if (n < lo || n > hi) schema(std::string(key) + " out of range");
  return n;
}

std::string get_url(const json& obj, const char* key) {
  const auto& s = get_string(obj, key);
  if (s.empty()) schema(std::string(key) + " must be non-empty");
  return s;
}

constexpr std::int64_t kI64Max = std::numeric_limits<std::int64_t>::max();

void check_range(std::int64_t v, std::int64_t lo, std::int64_t hi, const char* field) {
  if (v < lo || v > hi) schema(std::string(field) + " out of range");
}

json to_json(const SessionOffer& m) {
  if (m.relying_party_url.empty()) schema("relying_party_url must be non-empty");
  check_range(m.min_trust, 0, kI64Max, "min_trust");
  check_range(m.expires_at, 0, kI64Max, "expires_at");
  return {{"session_token", m.session_token.str()},
          {"relying_party_url", m.relying_party_url},
          {"min_trust", m.min_trust},
          {"expires_at", m.expires_at}};
}

json to_json(const Advertisement& m) {
  if (m.manufacturer_url.empty()) schema("manufacturer_url must be non-empty");
  return {{"device_id", m.device_id.str()},
          {"totp_code", m.totp_code.str()},
          {"manufacturer_url", m.manufacturer_url}};
}

json to_json(const VerificationRequest& m) {
  return {{"device_id", m.device_id.str()},
          {"totp_code", m.totp_code.str()},
          {"session_token", m.session_token.str()}};
}

json to_json(const VerificationRejection& m) {
  return {{"device_id", m.device_id.str()}, {"reason", std::string(to_string(m.reason))}};
}

json to_json(const TrustVoucher& m) {
  check_range(m.trust, kMinTrust, kMaxTrust, "trust");
  check_range(m.issued_at, 0, kI64Max, "issued_at");
  return {{"session_token", m.session_token.str()},
          {"device_id", m.device_id.str()},
          {"trust", m.trust},
          {"issued_at", m.issued_at},
          {"manufacturer_name", m.manufacturer_name.str()},
          {"signature", hex_encode(m.signature)}};
}

json to_json(const Decision& m) {
  check_range(m.total_trust, 0, kI64Max, "total_trust");
  return {{"session_token", m.session_token.str()},
          {"status", std::string(to_string(m.status))},
          {"total_trust", m.total_trust}};
}

json parse_object(std::string_view bytes) {
  json obj;
  try {
    obj = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::MalformedMessage, e.what());
  }
  if (!obj.is_object()) schema("message must be a map");
  return obj;
}

SessionOffer offer_from(const json& o) {
  require_exact_keys(o, {"session_token", "relying_party_url", "min_trust", "expires_at"});
  return {SessionToken::parse(get_string(o, "session_token")), get_url(o, "relying_party_url"),
          get_int(o, "min_trust", 0, kI64Max), get_int(o, "expires_at", 0, kI64Max)};
}

Advertisement advertisement_from(const json& o) {
  require_exact_keys(o, {"device_id", "totp_code", "manufacturer_url"});
  auto code = TotpCode::try_parse(get_string(o, "totp_code"));
  if (!code) schema("totp_code must be 6 decimal digits");
  return {DeviceId::parse(get_string(o, "device_id")), *code, get_url(o, "manufacturer_url")};
}

VerificationRequest request_from(const json& o) {
  require_exact_keys(o, {"device_id", "totp_code", "session_token"});
  auto code = TotpCode::try_parse(get_string(o, "totp_code"));
  if (!code) schema("totp_code must be 6 decimal digits");
  return {DeviceId::parse(get_string(o, "device_id")), *code,
          SessionToken::parse(get_string(o, "session_token"))};
}

VerificationRejection rejection_from(const json& o) {
  require_exact_keys(o, {"device_id", "reason"});
  auto reason = parse_reject_reason(get_string(o, "reason"));
  if (!reason) schema("unknown rejection reason");
  return {DeviceId::parse(get_string(o, "device_id")), *reason};
}

TrustVoucher voucher_from(const json& o) {
  require_exact_keys(o, {"session_token", "device_id", "trust", "issued_at", "manufacturer_name",
                         "signature"});
  TrustVoucher v{SessionToken::parse(get_string(o, "session_token")),
                 DeviceId::parse(get_string(o, "device_id")),
                 static_cast<int>(get_int(o, "trust", kMinTrust, kMaxTrust)),
                 get_int(o, "issued_at", 0, kI64Max),
                 ManufacturerName::parse(get_string(o, "manufacturer_name")),
                 {}};
  const auto& sig_hex = get_string(o, "signature");
  if (sig_hex.size() != v.signature.size() * 2 || !is_lower_hex(sig_hex)) {
    schema("signature must be 128 lowercase hex chars");
  }
  auto sig = hex_decode(sig_hex);
  std::copy(sig->begin(), sig->end(), v.signature.begin());
  return v;
}

Decision decision_from(const json& o) {
  require_exact_keys(o, {"session_token", "status", "total_trust"});
  auto status = parse_session_status(get_string(o, "status"));
  if (!status) schema("unknown session status");
  return {SessionToken::parse(get_string(o, "session_token")), *status,
          get_int(o, "total_trust", 0, kI64Max)};
}

}  // namespace

std::string_view kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::SessionOffer: return "session_offer";
    case MessageKind::Advertisement: return "advertisement";
    case MessageKind::VerificationRequest: return "verification_request";
    case MessageKind::VerificationRejection: return "verification_rejection";
    case MessageKind::TrustVoucher: return "trust_voucher";
    case MessageKind::Decision: return "decision";
  }
  return "unknown";
}

MessageKind kind_of(const Message& message) { return static_cast<MessageKind>(message.index()); }

std::string canonical_dump(const nlohmann::json& value) {
  try {
    return value.dump();
  } catch (const json::type_error& e) {
    // invalid UTF-8 in a string field
    throw Error(Errc::SchemaViolation, e.what());
  }
}

std::string encode_message(const Message& message) {
  auto out = canonical_dump(std::visit([](const auto& m) { return to_json(m); }, message));
  if (out.size() >= kMaxMessageBytes) {
    throw Error(Errc::EncodingOverflow,
                std::string(kind_name(kind_of(message))) + " encodes to " +
                    std::to_string(out.size()) + " bytes");
  }
  return out;
}

Message decode_message(std::string_view bytes, MessageKind expected) {
  const json o = parse_object(bytes);
  switch (expected) {
    case MessageKind::SessionOffer: return offer_from(o);
    case MessageKind::Advertisement: return advertisement_from(o);
    case MessageKind::VerificationRequest: return request_from(o);
    case MessageKind::VerificationRejection: return rejection_from(o);
    case MessageKind::TrustVoucher: return voucher_from(o);
    case MessageKind::Decision: return decision_from(o);
  }
  schema("unknown message kind");
}

template <>
SessionOffer decode_as<SessionOffer>(std::string_view b) {
  return offer_from(parse_object(b));
}
template <>
Advertisement decode_as<Advertisement>(std::string_view b) {
  return advertisement_from(parse_object(b));
}
template <>
VerificationRequest decode_as<VerificationRequest>(std::string_view b) {
  return request_from(parse_object(b));
}
template <>
VerificationRejection decode_as<VerificationRejection>(std::string_view b) {
  return rejection_from(parse_object(b));
}
template <>
TrustVoucher decode_as<TrustVoucher>(std::string_view b) {
  return voucher_from(parse_object(b));
}
template <>
Decision decode_as<Decision>(std::string_view b) {
  return decision_from(parse_object(b));
}

}  // namespace trustware
