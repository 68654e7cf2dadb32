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

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "trustware/clock.hpp"

namespace trustware::sim {

/// One message seen on the simulated network. `voucher` is a short
/// fingerprint (first 8 signature bytes) linking issue, delivery and verdict.
struct LedgerEntry {
  UnixSeconds t = 0;
  std::uint64_t seq = 0;
  std::string from;
  std::string to;
  std::string kind;
  std::string session;
  std::string device;
  std::string voucher;
  std::optional<int> trust;
  std::string result;
  std::string reason;
  std::size_t bytes = 0;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

/// Append-only, stamped with the clock at record time.
class Ledger {
 public:
  explicit Ledger(const Clock& clock) : clock_(clock) {}

  void record(LedgerEntry entry);
  std::vector<LedgerEntry> entries() const;

 private:
  const Clock& clock_;
  mutable std::mutex mutex_;
  std::vector<LedgerEntry> entries_;
};

}  // namespace trustware::sim
