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

#include "trustware/otp.hpp"

#include <array>
#include <string>

namespace trustware {

IntervalIndex interval_index(UnixSeconds unix_time_s) {
  if (unix_time_s < 0) throw Error(Errc::NegativeTime, std::to_string(unix_time_s));
  return {unix_time_s / kTotpStepSeconds};
}

TotpCode totp(const DeviceSecret& secret, IntervalIndex interval) {
  std::array<std::uint8_t, 8> counter{};
  auto v = static_cast<std::uint64_t>(interval.value);
  for (int i = 7; i >= 0; --i) {
    counter[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  const auto mac = hmac_sha1(secret.key(), counter);

  const std::size_t offset = mac.back() & 0x0f;
  const std::uint32_t binary = (static_cast<std::uint32_t>(mac[offset] & 0x7f) << 24) |
                               (static_cast<std::uint32_t>(mac[offset + 1]) << 16) |
                               (static_cast<std::uint32_t>(mac[offset + 2]) << 8) |
                               static_cast<std::uint32_t>(mac[offset + 3]);

  std::string digits(TotpCode::kDigits, '0');
  std::uint32_t rem = binary % 1'000'000u;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    *it = static_cast<char>('0' + rem % 10);
    rem /= 10;
  }
  return TotpCode::parse(digits);
}

std::optional<IntervalIndex> verify_totp(const DeviceSecret& secret, std::string_view code,
                                         UnixSeconds now, std::int64_t skew_intervals) {
  const auto expected = TotpCode::try_parse(code);
  if (!expected) throw Error(Errc::MalformedCode, "code must be 6 decimal digits");
  if (skew_intervals < 0) throw Error(Errc::InvalidArgument, "skew must be non-negative");

  const auto current = interval_index(now);
  auto matches = [&](std::int64_t i) { return i >= 0 && totp(secret, {i}) == *expected; };

  if (matches(current.value)) return current;
  for (std::int64_t d = 1; d <= skew_intervals; ++d) {
    if (matches(current.value - d)) return IntervalIndex{current.value - d};
  }
  for (std::int64_t d = 1; d <= skew_intervals; ++d) {
    if (matches(current.value + d)) return IntervalIndex{current.value + d};
  }
  return std::nullopt;
}

}  // namespace trustware
