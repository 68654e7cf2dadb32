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
#include <string_view>

#include "trustware/types.hpp"

namespace trustware {

inline constexpr std::int64_t kTotpStepSeconds = 30;

/// Count of whole 30-second steps since the Unix epoch.
struct IntervalIndex {
  std::int64_t value = 0;
  friend auto operator<=>(const IntervalIndex&, const IntervalIndex&) = default;
};

/// Throws NegativeTime for times before the epoch.
IntervalIndex interval_index(UnixSeconds unix_time_s);

/// HMAC-SHA1 over the 8-byte big-endian interval, dynamic truncation to 31
/// bits, reduced mod 10^6 and zero-padded to six digits.
TotpCode totp(const DeviceSecret& secret, IntervalIndex interval);

/// Searches [now - skew, now + skew] for an interval whose code equals `code`.
/// The current interval wins ties, then past intervals nearest-first, then
/// future ones. Throws MalformedCode when `code` is not six digits.
std::optional<IntervalIndex> verify_totp(const DeviceSecret& secret, std::string_view code,
                                         UnixSeconds now, std::int64_t skew_intervals);

}  // namespace trustware
