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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trustware/service.hpp"

namespace trustware {

/// `[manufacturer]` section of a live manufacturer config.
struct ManufacturerNodeConfig {
  std::string name;
  /// URL advertised by this manufacturer's devices.
  std::string url;
  std::string host = "127.0.0.1";
  int port = 8081;
  std::filesystem::path key_file;
  /// Empty keeps the device database in memory.
  std::filesystem::path journal;
  std::string heuristic = "inverse-use";
  std::int64_t rate_limit_s = 10;
  std::int64_t skew_intervals = 1;
  std::optional<std::string> operator_token;
};

/// `[relying_party]` section of a live relying-party config.
struct RelyingPartyNodeConfig {
  std::string url;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path registry;
  TrustPolicy policy;
};

/// Relative paths resolve against the config file's directory. Overrides are
/// `section.key=value`. Throws ConfigInvalid.
ManufacturerNodeConfig load_manufacturer_config(const std::filesystem::path& path,
                                                const std::vector<std::string>& overrides = {});
RelyingPartyNodeConfig load_relying_party_config(const std::filesystem::path& path,
                                                 const std::vector<std::string>& overrides = {});

/// Key files hold the 32-byte Ed25519 seed as 64 lowercase hex chars.
/// Throws KeyLoadFailure.
SigningKey load_signing_key(const std::filesystem::path& path);
/// Refuses to overwrite. Throws KeyLoadFailure.
void write_signing_key(const std::filesystem::path& path, Rng& rng);

/// A manufacturer server and its HTTP service, ready to host.
struct ManufacturerNode {
  std::unique_ptr<ManufacturerServer> server;
  HttpTransport delivery;
  std::unique_ptr<ManufacturerService> service;
};

/// Throws KeyLoadFailure, ConfigInvalid or StorageFailure.
std::unique_ptr<ManufacturerNode> make_manufacturer_node(const ManufacturerNodeConfig& config,
                                                         const Clock& clock, std::uint64_t seed);

struct RelyingPartyNode {
  std::unique_ptr<RelyingParty> rp;
  std::unique_ptr<RelyingPartyService> service;
};

/// Throws MalformedRegistry or ConfigInvalid.
std::unique_ptr<RelyingPartyNode> make_relying_party_node(const RelyingPartyNodeConfig& config,
                                                          const Clock& clock, std::uint64_t seed);

}  // namespace trustware
