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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trustware {

std::string hex_encode(std::span<const std::uint8_t> bytes);

/// Lowercase or uppercase input; nullopt on odd length or a non-hex digit.
std::optional<std::vector<std::uint8_t>> hex_decode(std::string_view text);

/// RFC 4648 base32, uppercase alphabet, no padding.
std::string base32_encode(std::span<const std::uint8_t> bytes);

/// Rejects padding, lowercase, and trailing bits that are not zero.
std::optional<std::vector<std::uint8_t>> base32_decode(std::string_view text);

bool is_lower_hex(std::string_view text);

}  // namespace trustware
