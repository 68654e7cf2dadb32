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

#include "trustware/node.hpp"

#include <fstream>
#include <sstream>

#include "config_ini.hpp"
#include "trustware/codec.hpp"
#include "trustware/wire.hpp"

namespace trustware {
namespace {

using namespace config;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  if (value.empty()) return {};
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

int to_port(const std::string& where, std::int64_t v) {
  if (v < 0 || v > 65535) invalid(where + ": port outside [0, 65535]");
  return static_cast<int>(v);
}

void reject_other_sections(const ptree& tree, const std::string& allowed) {
  for (const auto& [name, body] : tree) {
    if (name != allowed) invalid("unknown section [" + name + "]");
  }
}

}  // namespace

ManufacturerNodeConfig load_manufacturer_config(const std::filesystem::path& path,
                                                const std::vector<std::string>& overrides) {
  const auto tree = read_ini_text(read_file(path), overrides, path.string());
  reject_other_sections(tree, "manufacturer");
  const auto it = tree.find("manufacturer");
  if (it == tree.not_found()) invalid(path.string() + ": missing [manufacturer] section");

  const auto base = path.parent_path();
  ManufacturerNodeConfig c;
  Section s("manufacturer", it->second);
  c.name = s.required("name");
  c.url = s.required("url");
  s.read("host", c.host);
  std::int64_t port = c.port;
  s.read("port", port);
  c.port = to_port("manufacturer.port", port);
  c.key_file = resolve(base, s.required("key_file"));
  if (auto j = s.str("journal")) c.journal = resolve(base, *j);
  s.read("heuristic", c.heuristic);
  s.read("rate_limit_s", c.rate_limit_s);
  s.read("skew_intervals", c.skew_intervals);
  if (auto t = s.str("operator_token"); t && !t->empty()) c.operator_token = *t;
  s.finish();

  if (!ManufacturerName::try_parse(c.name)) invalid("manufacturer.name: must match [a-z0-9-]{1,32}");
  try {
    TrustHeuristic::parse(c.heuristic, c.rate_limit_s);
  } catch (const Error& e) {
    invalid(std::string("manufacturer.heuristic: ") + e.what());
  }
  if (c.rate_limit_s < 0) invalid("manufacturer.rate_limit_s: must be non-negative");
  if (c.skew_intervals < 0 || c.skew_intervals > 10) invalid("manufacturer.skew_intervals: outside [0, 10]");
  return c;
}

RelyingPartyNodeConfig load_relying_party_config(const std::filesystem::path& path,
                                                 const std::vector<std::string>& overrides) {
  const auto tree = read_ini_text(read_file(path), overrides, path.string());
  reject_other_sections(tree, "relying_party");
  const auto it = tree.find("relying_party");
  if (it == tree.not_found()) invalid(path.string() + ": missing [relying_party] section");

  RelyingPartyNodeConfig c;
  Section s("relying_party", it->second);
  c.url = s.required("url");
  s.read("host", c.host);
  std::int64_t port = c.port;
  s.read("port", port);
  c.port = to_port("relying_party.port", port);
  c.registry = resolve(path.parent_path(), s.required("registry"));
  std::int64_t threshold = c.policy.threshold;
  s.read("threshold", threshold);
  if (threshold <= 0 || threshold > 1'000'000) invalid("relying_party.threshold: outside [1, 1000000]");
  c.policy.threshold = static_cast<int>(threshold);
  s.read("session_timeout_s", c.policy.session_timeout_s);
  s.read("voucher_freshness_s", c.policy.voucher_freshness_s);
  s.finish();
  try {
    c.policy.validate();
  } catch (const Error& e) {
    invalid(std::string("relying_party: ") + e.what());
  }
  return c;
}

SigningKey load_signing_key(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::KeyLoadFailure, "cannot read key file " + path.string());
  std::string text;
  std::getline(in, text);
  const auto seed = hex_decode(text);
  if (!seed || seed->size() != 32 || !is_lower_hex(text)) {
    throw Error(Errc::KeyLoadFailure, path.string() + ": expected 64 lowercase hex chars");
  }
  try {
    return SigningKey::from_seed(*seed);
  } catch (const Error& e) {
    throw Error(Errc::KeyLoadFailure, e.what());
  }
}

void write_signing_key(const std::filesystem::path& path, Rng& rng) {
  if (std::filesystem::exists(path)) {
    throw Error(Errc::KeyLoadFailure, path.string() + " already exists");
  }
  std::array<std::uint8_t, 32> seed{};
  rng.fill(seed);
  std::ofstream out(path);
  out << hex_encode(seed) << "\n";
  if (!out) throw Error(Errc::KeyLoadFailure, "cannot write " + path.string());
}

std::unique_ptr<ManufacturerNode> make_manufacturer_node(const ManufacturerNodeConfig& config,
                                                         const Clock& clock, std::uint64_t seed) {
  auto node = std::make_unique<ManufacturerNode>();
  ManufacturerIdentity identity{ManufacturerName::parse(config.name), config.url,
                                load_signing_key(config.key_file)};
  auto registry = config.journal.empty() ? std::make_unique<DeviceRegistry>()
                                         : std::make_unique<DeviceRegistry>(config.journal);
  node->server = std::make_unique<ManufacturerServer>(
      std::move(identity), TrustHeuristic::parse(config.heuristic, config.rate_limit_s),
      config.skew_intervals, std::move(registry));
  auto* delivery = &node->delivery;
  node->service = std::make_unique<ManufacturerService>(
      *node->server, clock,
      [delivery](const TrustVoucher& voucher, const std::string& rp_url) {
        HttpRequest req;
        req.path = "/voucher";
        req.body = encode_message(voucher);
        delivery->send(rp_url, req);
      },
      config.operator_token, seed);
  return node;
}

std::unique_ptr<RelyingPartyNode> make_relying_party_node(const RelyingPartyNodeConfig& config,
                                                          const Clock& clock, std::uint64_t seed) {
  auto node = std::make_unique<RelyingPartyNode>();
  node->rp = std::make_unique<RelyingParty>(config.url, ManufacturerRegistry::load_file(config.registry),
                                            config.policy, seed);
  node->service = std::make_unique<RelyingPartyService>(*node->rp, clock);
  return node;
}

}  // namespace trustware
