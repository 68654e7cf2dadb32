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

#include "trustware/types.hpp"

#include <array>
#include <utility>

namespace trustware {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EncodingOverflow: return "EncodingOverflow";
    case Errc::MalformedMessage: return "MalformedMessage";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::InvalidKey: return "InvalidKey";
    case Errc::NegativeTime: return "NegativeTime";
    case Errc::MalformedCode: return "MalformedCode";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::MalformedRegistry: return "MalformedRegistry";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::ScenarioDeadlock: return "ScenarioDeadlock";
    case Errc::BindFailure: return "BindFailure";
    case Errc::KeyLoadFailure: return "KeyLoadFailure";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::optional<DeviceSecret> DeviceSecret::try_parse(std::string_view text) {
  if (text.size() != kChars) return std::nullopt;
  auto key = base32_decode(text);
  if (!key || key->size() != kBytes) return std::nullopt;
  return DeviceSecret(std::string(text), std::move(*key));
}

DeviceSecret DeviceSecret::parse(std::string_view text) {
  if (auto s = try_parse(text)) return *s;
  throw Error(Errc::SchemaViolation, "secret must be 16 base32 chars decoding to 10 bytes");
}

DeviceSecret DeviceSecret::random(Rng& rng) {
  std::array<std::uint8_t, kBytes> key{};
  rng.fill(key);
  return *try_parse(base32_encode(key));
}

std::optional<ManufacturerName> ManufacturerName::try_parse(std::string_view text) {
  if (text.empty() || text.size() > kMaxChars) return std::nullopt;
  for (char c : text) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) return std::nullopt;
  }
  return ManufacturerName(std::string(text));
}

ManufacturerName ManufacturerName::parse(std::string_view text) {
  if (auto n = try_parse(text)) return *n;
  throw Error(Errc::SchemaViolation, "manufacturer name must match ^[a-z0-9-]{1,32}$");
}

std::optional<TotpCode> TotpCode::try_parse(std::string_view text) {
  if (text.size() != kDigits) return std::nullopt;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  return TotpCode(std::string(text));
}

TotpCode TotpCode::parse(std::string_view text) {
  if (auto c = try_parse(text)) return *c;
  throw Error(Errc::MalformedCode, "TOTP code must be 6 decimal digits");
}

namespace {

constexpr std::array<std::pair<RejectReason, std::string_view>, 12> kReasonNames{{
    {RejectReason::UnknownDevice, "unknown_device"},
    {RejectReason::BadTotp, "bad_totp"},
    {RejectReason::RateLimited, "rate_limited"},
    {RejectReason::ReplayedCode, "replayed_code"},
    {RejectReason::MalformedRequest, "malformed_request"},
    {RejectReason::UnknownSession, "unknown_session"},
    {RejectReason::SessionClosed, "session_closed"},
    {RejectReason::UnknownManufacturer, "unknown_manufacturer"},
    {RejectReason::BadSignature, "bad_signature"},
    {RejectReason::TokenMismatch, "token_mismatch"},
    {RejectReason::StaleVoucher, "stale_voucher"},
    {RejectReason::DuplicateDevice, "duplicate_device"},
}};

}  // namespace

std::string_view to_string(RejectReason reason) {
  for (const auto& [r, name] : kReasonNames) {
    if (r == reason) return name;
  }
  return "unknown";
}

std::optional<RejectReason> parse_reject_reason(std::string_view text) {
  for (const auto& [r, name] : kReasonNames) {
    if (name == text) return r;
  }
  return std::nullopt;
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::Pending: return "pending";
    case SessionStatus::Granted: return "granted";
    case SessionStatus::Denied: return "denied";
  }
  return "pending";
}

std::optional<SessionStatus> parse_session_status(std::string_view text) {
  if (text == "pending") return SessionStatus::Pending;
  if (text == "granted") return SessionStatus::Granted;
  if (text == "denied") return SessionStatus::Denied;
  return std::nullopt;
}

void TrustPolicy::validate() const {
  if (threshold <= 0 || session_timeout_s <= 0 || voucher_freshness_s <= 0 || skew_intervals <= 0) {
    throw Error(Errc::InvalidArgument, "trust policy fields must be strictly positive");
  }
}

SessionToken new_session_token(Rng& rng) { return SessionToken::random(rng); }

std::string signing_payload(const SessionToken& token, const DeviceId& device, int trust,
                            UnixSeconds issued_at, const ManufacturerName& manufacturer) {
  std::string out;
  out.reserve(SessionToken::kChars + DeviceId::kChars + 32 + manufacturer.str().size());
  out += token.str();
  out += '|';
  out += device.str();
  out += '|';
  out += std::to_string(trust);
  out += '|';
  out += std::to_string(issued_at);
  out += '|';
  out += manufacturer.str();
  return out;
}

std::string signing_payload(const TrustVoucher& v) {
  return signing_payload(v.session_token, v.device_id, v.trust, v.issued_at, v.manufacturer_name);
}

TrustVoucher sign_voucher(TrustVoucher voucher, const SigningKey& key) {
  voucher.signature = key.sign(signing_payload(voucher));
  return voucher;
}

bool verify_voucher(const TrustVoucher& voucher, const PublicKey& key) {
  return verify_signature(signing_payload(voucher), voucher.signature, key);
}

}  // namespace trustware
