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

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "trustware/types.hpp"

namespace trustware {

/// Every encoded protocol message must fit in a single packet-sized budget.
inline constexpr std::size_t kMaxMessageBytes = 1024;

enum class MessageKind {
  SessionOffer,
  Advertisement,
  VerificationRequest,
  VerificationRejection,
  TrustVoucher,
  Decision,
};

using Message = std::variant<SessionOffer, Advertisement, VerificationRequest,
                             VerificationRejection, TrustVoucher, Decision>;

std::string_view kind_name(MessageKind kind);
MessageKind kind_of(const Message& message);

/// Canonical text form: a JSON object with lexicographically sorted keys and
/// no insignificant whitespace. Throws EncodingOverflow at >= 1024 bytes and
/// SchemaViolation for values outside their type's range.
std::string encode_message(const Message& message);

/// Throws MalformedMessage for bad syntax, SchemaViolation for missing or
/// extra fields and out-of-shape values.
Message decode_message(std::string_view bytes, MessageKind expected);

template <class T>
T decode_as(std::string_view bytes);

template <>
SessionOffer decode_as<SessionOffer>(std::string_view bytes);
template <>
Advertisement decode_as<Advertisement>(std::string_view bytes);
template <>
VerificationRequest decode_as<VerificationRequest>(std::string_view bytes);
template <>
VerificationRejection decode_as<VerificationRejection>(std::string_view bytes);
template <>
TrustVoucher decode_as<TrustVoucher>(std::string_view bytes);
template <>
Decision decode_as<Decision>(std::string_view bytes);

/// Canonical dump of an arbitrary JSON object, used for journal and report
/// lines that are not protocol messages and carry no size budget.
std::string canonical_dump(const nlohmann::json& value);

}  // namespace trustware
