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

#include "trustware/relying_party.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace trustware {

void ManufacturerRegistry::add(const ManufacturerName& name, const PublicKey& key) {
  if (!entries_.emplace(name, key).second) {
    throw Error(Errc::MalformedRegistry, "duplicate manufacturer '" + name.str() + "'");
  }
}

const PublicKey* ManufacturerRegistry::find(const ManufacturerName& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

ManufacturerRegistry ManufacturerRegistry::load(std::istream& in) {
  ManufacturerRegistry reg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      throw Error(Errc::MalformedRegistry, "line " + std::to_string(line_no) + ": " + why);
    };
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      fail("expected name,public_key_hex");
    }
    auto name = ManufacturerName::try_parse(std::string_view(line).substr(0, comma));
    if (!name) fail("bad manufacturer name");
    auto key = hex_decode(std::string_view(line).substr(comma + 1));
    if (!key || key->size() != PublicKey{}.size()) fail("public key must be 64 hex chars");
    PublicKey pk{};
    std::copy(key->begin(), key->end(), pk.begin());
    reg.add(*name, pk);
  }
  return reg;
}

ManufacturerRegistry ManufacturerRegistry::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::MalformedRegistry, "cannot read " + path.string());
  return load(in);
}

std::string ManufacturerRegistry::to_text() const {
  std::ostringstream out;
  for (const auto& [name, key] : entries_) out << name.str() << ',' << hex_encode(key) << '\n';
  return out.str();
}

RelyingParty::RelyingParty(std::string url, ManufacturerRegistry registry,
                           TrustPolicy default_policy, std::uint64_t token_seed)
    : url_(std::move(url)),
      registry_(std::move(registry)),
      default_policy_(default_policy),
      rng_(token_seed) {
  if (url_.empty()) throw Error(Errc::InvalidArgument, "relying party url is empty");
  default_policy_.validate();
}

SessionOffer RelyingParty::open_session(UnixSeconds now) { return open_session(default_policy_, now); }

SessionOffer RelyingParty::open_session(const TrustPolicy& policy, UnixSeconds now) {
  policy.validate();
  std::unique_ptr<Slot> slot;
  {
    std::lock_guard lock(rng_mutex_);
    auto token = new_session_token(rng_);
    while (find(token) != nullptr) token = new_session_token(rng_);
    slot = std::make_unique<Slot>(Session{token, now, policy, 0, {}, SessionStatus::Pending, {}, {}});
  }
  SessionOffer offer{slot->session.token, url_, policy.threshold, slot->session.deadline()};

  std::unique_lock lock(map_mutex_);
  sessions_.emplace(offer.session_token, std::move(slot));
  return offer;
}

RelyingParty::Slot* RelyingParty::find(const SessionToken& token) const {
  std::shared_lock lock(map_mutex_);
  auto it = sessions_.find(token);
  return it == sessions_.end() ? nullptr : it->second.get();
}

void RelyingParty::settle(Session& s, UnixSeconds now) {
  if (s.status != SessionStatus::Pending) return;
  if (s.total_trust >= s.policy.threshold) {
    s.status = SessionStatus::Granted;
    s.decided_at = now;
  } else if (now >= s.deadline()) {
    s.status = SessionStatus::Denied;
    s.decided_at = s.deadline();
  }
}

AcceptOutcome RelyingParty::accept_voucher(const SessionToken& target, const TrustVoucher& voucher,
                                           UnixSeconds now) {
  Slot* slot = find(target);
  if (slot == nullptr) return RejectReason::UnknownSession;

  std::lock_guard lock(slot->mutex);
  Session& s = slot->session;
  settle(s, now);
  if (s.status != SessionStatus::Pending) return RejectReason::SessionClosed;

  const PublicKey* key = registry_.find(voucher.manufacturer_name);
  if (key == nullptr) return RejectReason::UnknownManufacturer;
  if (!verify_voucher(voucher, *key)) return RejectReason::BadSignature;
  if (voucher.session_token != s.token) return RejectReason::TokenMismatch;
  if (now - voucher.issued_at > s.policy.voucher_freshness_s) return RejectReason::StaleVoucher;
  if (s.contributing_devices.contains(voucher.device_id)) return RejectReason::DuplicateDevice;

  s.total_trust += voucher.trust;
  s.contributing_devices.insert(voucher.device_id);
  s.accepted.push_back(voucher);
  settle(s, now);
  return VoucherAccepted{s.total_trust, s.status};
}

Decision RelyingParty::session_decision(const SessionToken& token, UnixSeconds now) {
  Slot* slot = find(token);
  if (slot == nullptr) throw Error(Errc::UnknownSession, token.str());
  std::lock_guard lock(slot->mutex);
  settle(slot->session, now);
  return {token, slot->session.status, slot->session.total_trust};
}

std::optional<Session> RelyingParty::snapshot(const SessionToken& token) const {
  Slot* slot = find(token);
  if (slot == nullptr) return std::nullopt;
  std::lock_guard lock(slot->mutex);
  return slot->session;
}

std::vector<SessionToken> RelyingParty::tokens() const {
  std::shared_lock lock(map_mutex_);
  std::vector<SessionToken> out;
  for (const auto& [token, _] : sessions_) out.push_back(token);
  return out;
}

}  // namespace trustware
