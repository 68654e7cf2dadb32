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

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

#include "trustware/rng.hpp"

namespace trustware {

using Signature = std::array<std::uint8_t, 64>;
using PublicKey = std::array<std::uint8_t, 32>;
using KeySeed = std::array<std::uint8_t, 32>;
using Sha1Digest = std::array<std::uint8_t, 20>;

/// Ed25519 private key. Immutable once built; copies share the key material.
class SigningKey {
 public:
  static SigningKey from_seed(std::span<const std::uint8_t> seed);
  static SigningKey generate(Rng& rng);

  const PublicKey& public_key() const { return public_key_; }

  /// Deterministic for a fixed key and payload.
  Signature sign(std::span<const std::uint8_t> payload) const;
  Signature sign(std::string_view payload) const;

 private:
  struct Handle;
  explicit SigningKey(std::shared_ptr<const Handle> handle, PublicKey pk)
      : handle_(std::move(handle)), public_key_(pk) {}

  std::shared_ptr<const Handle> handle_;
  PublicKey public_key_{};
};

/// False for any mismatch, including malformed public keys.
bool verify_signature(std::span<const std::uint8_t> payload, const Signature& signature,
                      const PublicKey& public_key);
bool verify_signature(std::string_view payload, const Signature& signature,
                      const PublicKey& public_key);

Sha1Digest hmac_sha1(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message);

}  // namespace trustware
