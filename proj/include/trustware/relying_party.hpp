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

#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "trustware/types.hpp"

namespace trustware {

/// Trusted manufacturers and their voucher verification keys.
class ManufacturerRegistry {
 public:
  /// Throws MalformedRegistry on a duplicate name.
  void add(const ManufacturerName& name, const PublicKey& key);
  const PublicKey* find(const ManufacturerName& name) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<ManufacturerName, PublicKey>& entries() const { return entries_; }

  /// One `name,public_key_hex` line per manufacturer; blank lines and lines
  /// starting with '#' are skipped.
  static ManufacturerRegistry load(std::istream& in);
  static ManufacturerRegistry load_file(const std::filesystem::path& path);
  std::string to_text() const;

 private:
  std::map<ManufacturerName, PublicKey> entries_;
};

struct Session {
  SessionToken token;
  UnixSeconds created_at = 0;
  TrustPolicy policy;
  std::int64_t total_trust = 0;
  std::set<DeviceId> contributing_devices;
  SessionStatus status = SessionStatus::Pending;
  std::optional<UnixSeconds> decided_at;
  std::vector<TrustVoucher> accepted;

  UnixSeconds deadline() const { return created_at + policy.session_timeout_s; }
};

struct VoucherAccepted {
  std::int64_t total_trust = 0;
  SessionStatus status = SessionStatus::Pending;
};

using AcceptOutcome = std::variant<VoucherAccepted, RejectReason>;

/// The protected service's verifier. Sessions are independent; updates to
/// one session are serialised under its own lock.
class RelyingParty {
 public:
  RelyingParty(std::string url, ManufacturerRegistry registry, TrustPolicy default_policy,
               std::uint64_t token_seed);

  SessionOffer open_session(UnixSeconds now);
  SessionOffer open_session(const TrustPolicy& policy, UnixSeconds now);

  /// `target` names the session the voucher is being delivered to; in direct
  /// delivery it is the voucher's own token.
  AcceptOutcome accept_voucher(const SessionToken& target, const TrustVoucher& voucher,
                               UnixSeconds now);

  /// Throws UnknownSession.
  Decision session_decision(const SessionToken& token, UnixSeconds now);

  std::optional<Session> snapshot(const SessionToken& token) const;
  std::vector<SessionToken> tokens() const;

  const std::string& url() const { return url_; }
  const TrustPolicy& default_policy() const { return default_policy_; }
  const ManufacturerRegistry& registry() const { return registry_; }

 private:
  struct Slot {
    explicit Slot(Session s) : session(std::move(s)) {}
    mutable std::mutex mutex;
    Session session;
  };

  Slot* find(const SessionToken& token) const;
  static void settle(Session& s, UnixSeconds now);

  std::string url_;
  ManufacturerRegistry registry_;
  TrustPolicy default_policy_;

  std::mutex rng_mutex_;
  Rng rng_;

  mutable std::shared_mutex map_mutex_;
  std::map<SessionToken, std::unique_ptr<Slot>> sessions_;
};

}  // namespace trustware
