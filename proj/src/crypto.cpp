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

#include "trustware/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "trustware/error.hpp"

namespace trustware {
namespace {

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

struct SigningKey::Handle {
  PkeyPtr pkey;
};

SigningKey SigningKey::from_seed(std::span<const std::uint8_t> seed) {
  if (seed.size() != KeySeed{}.size()) {
    throw Error(Errc::InvalidKey, "Ed25519 seed must be 32 bytes");
  }
  PkeyPtr pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size()));
  if (!pkey) throw Error(Errc::InvalidKey, "OpenSSL rejected Ed25519 seed");

  PublicKey pk{};
  std::size_t len = pk.size();
  if (EVP_PKEY_get_raw_public_key(pkey.get(), pk.data(), &len) != 1 || len != pk.size()) {
    throw Error(Errc::InvalidKey, "cannot derive Ed25519 public key");
  }
  auto handle = std::make_shared<Handle>();
  handle->pkey = std::move(pkey);
  return SigningKey(std::move(handle), pk);
}

SigningKey SigningKey::generate(Rng& rng) {
  KeySeed seed{};
  rng.fill(seed);
  return from_seed(seed);
}

Signature SigningKey::sign(std::span<const std::uint8_t> payload) const {
  MdCtxPtr ctx(EVP_MD_CTX_new());
  Signature sig{};
  std::size_t len = sig.size();
  if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, handle_->pkey.get()) != 1 ||
      EVP_DigestSign(ctx.get(), sig.data(), &len, payload.data(), payload.size()) != 1 ||
      len != sig.size()) {
    throw Error(Errc::InvalidKey, "Ed25519 signing failed");
  }
  return sig;
}

Signature SigningKey::sign(std::string_view payload) const { return sign(as_bytes(payload)); }

bool verify_signature(std::span<const std::uint8_t> payload, const Signature& signature,
                      const PublicKey& public_key) {
  PkeyPtr pkey(
      EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size()));
  if (!pkey) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), payload.data(),
                          payload.size()) == 1;
}

bool verify_signature(std::string_view payload, const Signature& signature,
                      const PublicKey& public_key) {
  return verify_signature(as_bytes(payload), signature, public_key);
}

Sha1Digest hmac_sha1(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message) {
  Sha1Digest out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha1(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
           out.data(), &len) == nullptr ||
      len != out.size()) {
    throw Error(Errc::InvalidKey, "HMAC-SHA1 failed");
  }
  return out;
}

}  // namespace trustware
