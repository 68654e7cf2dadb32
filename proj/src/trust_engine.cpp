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

#include "trustware/trust_engine.hpp"

#include <charconv>
#include <string>

#include "trustware/wire.hpp"

namespace trustware {

void UsageHistory::prune_below(IntervalIndex floor) {
  consumed_intervals.erase(consumed_intervals.begin(), consumed_intervals.lower_bound(floor));
}

int compute_trust(const UsageHistory& usage) {
  return static_cast<int>(static_cast<std::uint64_t>(kMaxTrust) / (1 + usage.success_count));
}

TrustHeuristic TrustHeuristic::inverse_use(std::int64_t rate_limit_s) {
  return {Kind::InverseUse, kMaxTrust, rate_limit_s};
}

TrustHeuristic TrustHeuristic::constant(int value, std::int64_t rate_limit_s) {
  if (value < kMinTrust || value > kMaxTrust) {
    throw Error(Errc::InvalidArgument, "constant trust must be within 0..100");
  }
  return {Kind::Constant, value, rate_limit_s};
}

TrustHeuristic TrustHeuristic::parse(std::string_view spec, std::int64_t rate_limit_s) {
  if (rate_limit_s < 0) throw Error(Errc::InvalidArgument, "rate_limit_s must be >= 0");
  if (spec == "inverse-use") return inverse_use(rate_limit_s);
  constexpr std::string_view prefix = "constant:";
  if (spec.starts_with(prefix)) {
    const auto digits = spec.substr(prefix.size());
    int value = -1;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec == std::errc{} && ptr == digits.data() + digits.size()) {
      return constant(value, rate_limit_s);
    }
  }
  throw Error(Errc::InvalidArgument, "unknown heuristic '" + std::string(spec) + "'");
}

int TrustHeuristic::compute_trust(const UsageHistory& usage) const {
  switch (kind) {
    case Kind::InverseUse: return trustware::compute_trust(usage);
    case Kind::Constant: return constant_value;
  }
  return 0;
}

std::string TrustHeuristic::describe() const {
  return kind == Kind::InverseUse ? "inverse-use" : "constant:" + std::to_string(constant_value);
}

// ---- DeviceRegistry ----------------------------------------------------------

DeviceRegistry::DeviceRegistry(std::filesystem::path journal) : journal_path_(std::move(journal)) {
  if (std::filesystem::exists(journal_path_)) {
    std::ifstream in(journal_path_);
    if (!in) throw Error(Errc::StorageFailure, "cannot read " + journal_path_.string());
    replay(in);
  }
  journal_.open(journal_path_, std::ios::app);
  if (!journal_) throw Error(Errc::StorageFailure, "cannot open " + journal_path_.string());
}

void DeviceRegistry::replay(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto event = nlohmann::json::parse(line);
      const auto& kind = event.at("event").get_ref<const std::string&>();
      const auto id = DeviceId::parse(event.at("device_id").get<std::string>());
      if (kind == "provision") {
        insert({id, DeviceSecret::parse(event.at("secret").get<std::string>()),
                event.at("registered_at").get<UnixSeconds>(), {}},
               false);
      } else if (kind == "success") {
        Slot* slot = find_slot(id);
        if (slot == nullptr) throw Error(Errc::StorageFailure, "success for unknown device");
        auto& usage = slot->record.usage;
        usage.success_count += 1;
        usage.last_success_at = event.at("at").get<UnixSeconds>();
        usage.consumed_intervals.insert({event.at("interval").get<std::int64_t>()});
      } else {
        throw Error(Errc::StorageFailure, "unknown event '" + kind + "'");
      }
    } catch (const Error& e) {
      throw Error(Errc::StorageFailure,
                  journal_path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(Errc::StorageFailure,
                  journal_path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void DeviceRegistry::append(const std::string& line) {
  if (journal_path_.empty()) return;
  std::lock_guard lock(journal_mutex_);
  journal_ << line << '\n';
  journal_.flush();
  if (!journal_) throw Error(Errc::StorageFailure, "journal write failed");
}

DeviceRegistry::Slot* DeviceRegistry::find_slot(const DeviceId& id) const {
  std::shared_lock lock(map_mutex_);
  auto it = slots_.find(id);
  return it == slots_.end() ? nullptr : it->second.get();
}

void DeviceRegistry::insert(DeviceRecord record, bool journal) {
  std::unique_lock lock(map_mutex_);
  if (slots_.contains(record.device_id)) {
    throw Error(Errc::InvalidArgument, "device " + record.device_id.str() + " already registered");
  }
  if (journal) {
    append(canonical_dump({{"event", "provision"},
                           {"device_id", record.device_id.str()},
                           {"secret", record.secret.str()},
                           {"registered_at", record.registered_at}}));
  }
  const auto id = record.device_id;
  slots_.emplace(id, std::make_unique<Slot>(std::move(record)));
}

DeviceRecord DeviceRegistry::provision(Rng& rng, UnixSeconds now) {
  for (;;) {
    DeviceRecord rec{DeviceId::random(rng), DeviceSecret::random(rng), now, {}};
    if (find_slot(rec.device_id) != nullptr) continue;
    insert(rec, true);
    return rec;
  }
}

DeviceRecord DeviceRegistry::enroll(const DeviceId& id, const DeviceSecret& secret, UnixSeconds now) {
  DeviceRecord rec{id, secret, now, {}};
  insert(rec, true);
  return rec;
}

std::optional<DeviceRecord> DeviceRegistry::lookup(const DeviceId& id) const {
  Slot* slot = find_slot(id);
  if (slot == nullptr) return std::nullopt;
  std::lock_guard lock(slot->mutex);
  return slot->record;
}

std::size_t DeviceRegistry::size() const {
  std::shared_lock lock(map_mutex_);
  return slots_.size();
}

void DeviceRegistry::set_replay_horizon(std::int64_t intervals) {
  if (intervals < 0) throw Error(Errc::InvalidArgument, "replay horizon must be >= 0");
  replay_horizon_ = intervals;
}

void DeviceRegistry::commit_success(Slot& slot, IntervalIndex interval, UnixSeconds now) {
  // Journal first: a crash between the two steps replays to the new state.
  append(canonical_dump({{"event", "success"},
                         {"device_id", slot.record.device_id.str()},
                         {"at", now},
                         {"interval", interval.value}}));
  auto& usage = slot.record.usage;
  usage.success_count += 1;
  usage.last_success_at = now;
  usage.consumed_intervals.insert(interval);
  usage.prune_below({interval_index(now).value - replay_horizon_.load()});
}

// ---- ManufacturerServer ------------------------------------------------------

ManufacturerServer::ManufacturerServer(ManufacturerIdentity identity, TrustHeuristic heuristic,
                                       std::int64_t skew_intervals,
                                       std::unique_ptr<DeviceRegistry> registry)
    : identity_(std::move(identity)),
      heuristic_(heuristic),
      skew_intervals_(skew_intervals),
      registry_(std::move(registry)) {
  if (identity_.url.empty()) throw Error(Errc::InvalidArgument, "manufacturer url is empty");
  if (skew_intervals_ < 0) throw Error(Errc::InvalidArgument, "skew must be >= 0");
  if (heuristic_.rate_limit_s < 0) throw Error(Errc::InvalidArgument, "rate limit must be >= 0");
  if (!registry_) registry_ = std::make_unique<DeviceRegistry>();
  registry_->set_replay_horizon(skew_intervals_ + 1);
}

VerificationOutcome ManufacturerServer::handle_verification(const VerificationRequest& request,
                                                            UnixSeconds now) {
  auto reject = [&](RejectReason reason) -> VerificationOutcome {
    return VerificationRejection{request.device_id, reason};
  };

  auto outcome = registry_->with_device(
      request.device_id,
      [&](const DeviceRecord& rec, const DeviceRegistry::CommitFn& commit) -> VerificationOutcome {
        const auto matched = verify_totp(rec.secret, request.totp_code.str(), now, skew_intervals_);
        if (!matched) return reject(RejectReason::BadTotp);

        const auto& usage = rec.usage;
        if (usage.last_success_at && now - *usage.last_success_at < heuristic_.rate_limit_s) {
          return reject(RejectReason::RateLimited);
        }
        if (usage.consumed_intervals.contains(*matched)) return reject(RejectReason::ReplayedCode);

        // Trust reflects prior uses, so compute before committing this one.
        const int trust = heuristic_.compute_trust(usage);
        TrustVoucher voucher{request.session_token, request.device_id, trust, now,
                             identity_.name, {}};
        voucher = sign_voucher(std::move(voucher), identity_.key);
        commit(*matched, now);
        return voucher;
      });

  if (!outcome) return reject(RejectReason::UnknownDevice);
  return std::move(*outcome);
}

}  // namespace trustware
