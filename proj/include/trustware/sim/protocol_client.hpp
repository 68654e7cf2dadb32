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

#include <optional>
#include <string>
#include <variant>

#include "trustware/service.hpp"
#include "trustware/sim/ledger.hpp"

namespace trustware::sim {

/// Client-side calls against the protocol's HTTP surface. Every request and
/// response is recorded in the ledger with its encoded size.
struct Endpoint {
  Transport& transport;
  Ledger& ledger;
};

std::string voucher_fingerprint(const TrustVoucher& voucher);

/// nullopt when the relying party cannot be reached or answers garbage.
std::optional<SessionOffer> request_session(Endpoint ep, const std::string& actor,
                                            const std::string& rp_url);

/// nullopt when the manufacturer is unreachable or answers garbage.
/// `deliver_to` asks the manufacturer to post the voucher to that relying
/// party itself.
std::optional<VerificationOutcome> request_verification(
    Endpoint ep, const std::string& actor, const std::string& manufacturer_url,
    const VerificationRequest& request, const std::optional<std::string>& deliver_to);

using DeliveryOutcome = std::variant<Decision, RejectReason>;

/// `target` selects the receiving session; without it the voucher's own
/// token is used.
std::optional<DeliveryOutcome> deliver_voucher(Endpoint ep, const std::string& actor,
                                               const std::string& rp_url,
                                               const TrustVoucher& voucher,
                                               const std::optional<SessionToken>& target);

std::optional<Decision> query_decision(Endpoint ep, const std::string& actor,
                                       const std::string& rp_url, const SessionToken& token);

}  // namespace trustware::sim
