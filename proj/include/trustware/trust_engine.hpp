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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string_view>
#include <variant>

#include "trustware/otp.hpp"
#include "trustware/types.hpp"

namespace trustware {

struct UsageHistory {
  std::uint64_t success_count = 0;
  std::optional<UnixSeconds> last_success_at;
  std::set<IntervalIndex> consumed_intervals;

  /// Drops consumed intervals strictly below `floor`.
  void prune_below(IntervalIndex floor);
  friend bool operator==(const UsageHistory&, const UsageHistory&) = default;
};

struct DeviceRecord {
  DeviceId device_id;
  DeviceSecret secret;
  UnixSeconds registered_at = 0;
  UsageHistory usage;
  friend bool operator==(const DeviceRecord&, const DeviceRecord&) = default;
};

/// floor(100 / (1 + prior successful uses)).
int compute_trust(const UsageHistory& usage);

/// Manufacturer trust policy. The rate limit applies to every kind.
struct TrustHeuristic {
  enum class Kind { InverseUse, Constant };

  Kind kind = Kind::InverseUse;
  int constant_value = kMaxTrust;
  std::int64_t rate_limit_s = 10;

  static TrustHeuristic inverse_use(std::int64_t rate_limit_s = 10);
  static TrustHeuristic constant(int value, std::int64_t rate_limit_s = 10);
  /// "inverse-use" or "constant:<0..100>".
  static TrustHeuristic parse(std::string_view spec, std::int64_t rate_limit_s = 10);

  int compute_trust(const UsageHistory& usage) const;
  std::string describe() const;
};

/// Device database with an optional append-only journal. Each journal line is
/// one canonical event; the journal is replayed on construction.
class DeviceRegistry {
 public:
  DeviceRegistry() = default;
  explicit DeviceRegistry(std::filesystem::path journal);

  DeviceRegistry(const DeviceRegistry&) = delete;
  DeviceRegistry& operator=(const DeviceRegistry&) = delete;

  using CommitFn = std::function<void(IntervalIndex, UnixSeconds)>;

  /// Fresh random ID (retried on collision) and 10-byte secret.
  DeviceRecord provision(Rng& rng, UnixSeconds now);

  /// Registers a device whose identity was minted elsewhere (roster import).
  /// Throws InvalidArgument if the ID is taken.
  DeviceRecord enroll(const DeviceId& id, const DeviceSecret& secret, UnixSeconds now);

  std::optional<DeviceRecord> lookup(const DeviceId& id) const;
  std::size_t size() const;

  /// Each commit drops consumed intervals older than `intervals` steps before
  /// the commit time. Defaults to 2.
  void set_replay_horizon(std::int64_t intervals);

  /// Runs `fn(record, commit)` holding the device's lock, where
  /// `commit(interval, now)` journals and applies one successful use.
  /// Returns nullopt for unknown devices.
  template <class Fn>
  auto with_device(const DeviceId& id, Fn&& fn)
      -> std::optional<std::invoke_result_t<Fn, const DeviceRecord&, const CommitFn&>>;

 private:
  struct Slot {
    explicit Slot(DeviceRecord r) : record(std::move(r)) {}
    std::mutex mutex;
    DeviceRecord record;
  };

  Slot* find_slot(const DeviceId& id) const;
  void insert(DeviceRecord record, bool journal);
  void replay(std::istream& in);
  void append(const std::string& line);
  void commit_success(Slot& slot, IntervalIndex interval, UnixSeconds now);

  mutable std::shared_mutex map_mutex_;
  std::map<DeviceId, std::unique_ptr<Slot>> slots_;

  std::atomic<std::int64_t> replay_horizon_{2};

  std::mutex journal_mutex_;
  std::filesystem::path journal_path_;
  std::ofstream journal_;
};

template <class Fn>
auto DeviceRegistry::with_device(const DeviceId& id, Fn&& fn)
    -> std::optional<std::invoke_result_t<Fn, const DeviceRecord&, const CommitFn&>> {
  Slot* slot = find_slot(id);
  if (slot == nullptr) return std::nullopt;
  std::lock_guard lock(slot->mutex);
  const CommitFn commit = [this, slot](IntervalIndex interval, UnixSeconds now) {
    commit_success(*slot, interval, now);
  };
  return fn(static_cast<const DeviceRecord&>(slot->record), commit);
}

struct ManufacturerIdentity {
  ManufacturerName name;
  std::string url;
  SigningKey key;

  const PublicKey& public_key() const { return key.public_key(); }
};

using VerificationOutcome = std::variant<TrustVoucher, VerificationRejection>;

/// The manufacturer authentication server: TOTP check, rate limit, replay
/// defence, trust heuristic and voucher signing.
class ManufacturerServer {
 public:
  ManufacturerServer(ManufacturerIdentity identity, TrustHeuristic heuristic,
                     std::int64_t skew_intervals, std::unique_ptr<DeviceRegistry> registry);

  VerificationOutcome handle_verification(const VerificationRequest& request, UnixSeconds now);

  DeviceRecord provision_device(Rng& rng, UnixSeconds now) { return registry_->provision(rng, now); }
  DeviceRecord enroll_device(const DeviceId& id, const DeviceSecret& secret, UnixSeconds now) {
    return registry_->enroll(id, secret, now);
  }
  std::optional<DeviceRecord> registry_lookup(const DeviceId& id) const {
    return registry_->lookup(id);
  }

  const ManufacturerIdentity& identity() const { return identity_; }
  const TrustHeuristic& heuristic() const { return heuristic_; }
  std::int64_t skew_intervals() const { return skew_intervals_; }

 private:
  ManufacturerIdentity identity_;
  TrustHeuristic heuristic_;
  std::int64_t skew_intervals_;
  std::unique_ptr<DeviceRegistry> registry_;
};

}  // namespace trustware
