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

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trustware/codec.hpp"
#include "trustware/crypto.hpp"
#include "trustware/error.hpp"
#include "trustware/rng.hpp"

namespace trustware {

using UnixSeconds = std::int64_t;

/// Fixed-width lowercase hex identifier. Construction validates shape, so a
/// live value always satisfies its invariant.
template <std::size_t Chars, class Tag>
class HexId {
 public:
  static constexpr std::size_t kChars = Chars;
  static constexpr std::size_t kBytes = Chars / 2;

  static std::optional<HexId> try_parse(std::string_view text) {
    if (text.size() != Chars || !is_lower_hex(text)) return std::nullopt;
    return HexId(std::string(text));
  }

  static HexId parse(std::string_view text) {
    if (auto id = try_parse(text)) return *id;
    throw Error(Errc::SchemaViolation,
                std::string(Tag::kName) + " must be " + std::to_string(Chars) + " lowercase hex chars");
  }

  static HexId random(Rng& rng) {
    std::uint8_t bytes[kBytes];
    rng.fill(bytes);
    return HexId(hex_encode(bytes));
  }

  const std::string& str() const { return value_; }

  friend auto operator<=>(const HexId&, const HexId&) = default;

 private:
  explicit HexId(std::string value) : value_(std::move(value)) {}
  std::string value_;
};

struct DeviceIdTag {
  static constexpr const char* kName = "device_id";
};
struct SessionTokenTag {
  static constexpr const char* kName = "session_token";
};

/// 64 random bits.
using DeviceId = HexId<16, DeviceIdTag>;
/// 128 random bits.
using SessionToken = HexId<32, SessionTokenTag>;

/// 16 base32 characters decoding to a 10-byte HMAC key.
class DeviceSecret {
 public:
  static constexpr std::size_t kChars = 16;
  static constexpr std::size_t kBytes = 10;

  static std::optional<DeviceSecret> try_parse(std::string_view text);
  static DeviceSecret parse(std::string_view text);
  static DeviceSecret random(Rng& rng);

  const std::string& str() const { return encoded_; }
  const std::vector<std::uint8_t>& key() const { return key_; }

  friend bool operator==(const DeviceSecret& a, const DeviceSecret& b) {
    return a.encoded_ == b.encoded_;
  }

 private:
  DeviceSecret(std::string encoded, std::vector<std::uint8_t> key)
      : encoded_(std::move(encoded)), key_(std::move(key)) {}
  std::string encoded_;
  std::vector<std::uint8_t> key_;
};

/// ^[a-z0-9-]{1,32}$, which keeps the pipe-joined signing payload injective.
class ManufacturerName {
 public:
  static constexpr std::size_t kMaxChars = 32;

  static std::optional<ManufacturerName> try_parse(std::string_view text);
  static ManufacturerName parse(std::string_view text);

  const std::string& str() const { return value_; }
  friend auto operator<=>(const ManufacturerName&, const ManufacturerName&) = default;

 private:
  explicit ManufacturerName(std::string v) : value_(std::move(v)) {}
  std::string value_;
};

/// Exactly six decimal digits.
class TotpCode {
 public:
  static constexpr std::size_t kDigits = 6;

  static std::optional<TotpCode> try_parse(std::string_view text);
  static TotpCode parse(std::string_view text);

  const std::string& str() const { return value_; }
  friend auto operator<=>(const TotpCode&, const TotpCode&) = default;

 private:
  explicit TotpCode(std::string v) : value_(std::move(v)) {}
  std::string value_;
};

inline constexpr int kMinTrust = 0;
inline constexpr int kMaxTrust = 100;

// ---- wire messages ---------------------------------------------------------

struct SessionOffer {
  SessionToken session_token;
  std::string relying_party_url;
  std::int64_t min_trust = 0;
  UnixSeconds expires_at = 0;
  friend bool operator==(const SessionOffer&, const SessionOffer&) = default;
};

struct Advertisement {
  DeviceId device_id;
  TotpCode totp_code;
  std::string manufacturer_url;
  friend bool operator==(const Advertisement&, const Advertisement&) = default;
};

struct VerificationRequest {
  DeviceId device_id;
  TotpCode totp_code;
  SessionToken session_token;
  friend bool operator==(const VerificationRequest&, const VerificationRequest&) = default;
};

/// Machine-readable refusal reasons shared by the manufacturer and the
/// relying party.
enum class RejectReason {
  // manufacturer
  UnknownDevice,
  BadTotp,
  RateLimited,
  ReplayedCode,
  MalformedRequest,
  // relying party
  UnknownSession,
  SessionClosed,
  UnknownManufacturer,
  BadSignature,
  TokenMismatch,
  StaleVoucher,
  DuplicateDevice,
};

std::string_view to_string(RejectReason reason);
std::optional<RejectReason> parse_reject_reason(std::string_view text);

struct VerificationRejection {
  DeviceId device_id;
  RejectReason reason = RejectReason::MalformedRequest;
  friend bool operator==(const VerificationRejection&, const VerificationRejection&) = default;
};

struct TrustVoucher {
  SessionToken session_token;
  DeviceId device_id;
  int trust = 0;
  UnixSeconds issued_at = 0;
  ManufacturerName manufacturer_name;
  Signature signature{};
  friend bool operator==(const TrustVoucher&, const TrustVoucher&) = default;
};

enum class SessionStatus { Pending, Granted, Denied };

std::string_view to_string(SessionStatus status);
std::optional<SessionStatus> parse_session_status(std::string_view text);

struct Decision {
  SessionToken session_token;
  SessionStatus status = SessionStatus::Pending;
  std::int64_t total_trust = 0;
  friend bool operator==(const Decision&, const Decision&) = default;
};

struct TrustPolicy {
  std::int64_t threshold = 100;
  std::int64_t session_timeout_s = 30;
  std::int64_t voucher_freshness_s = 60;
  std::int64_t skew_intervals = 1;

  /// Throws InvalidArgument unless every field is strictly positive.
  void validate() const;
  friend bool operator==(const TrustPolicy&, const TrustPolicy&) = default;
};

// ---- tokens and signatures -------------------------------------------------

SessionToken new_session_token(Rng& rng);

/// `session_token|device_id|trust|issued_at|manufacturer_name`, UTF-8.
std::string signing_payload(const SessionToken& token, const DeviceId& device, int trust,
                            UnixSeconds issued_at, const ManufacturerName& manufacturer);
std::string signing_payload(const TrustVoucher& voucher);

/// Fills in the signature of an otherwise complete voucher.
TrustVoucher sign_voucher(TrustVoucher voucher, const SigningKey& key);
bool verify_voucher(const TrustVoucher& voucher, const PublicKey& key);

}  // namespace trustware
