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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "trustware/clock.hpp"
#include "trustware/relying_party.hpp"
#include "trustware/trust_engine.hpp"

namespace trustware {

struct HttpRequest {
  std::string method = "POST";
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;
  std::string body;
};

/// status 0 means the peer could not be reached.
struct HttpResponse {
  int status = 0;
  std::string body;
};

/// A component reachable over the protocol's HTTP surface. Handlers speak
/// encoded wire messages only.
class Service {
 public:
  virtual ~Service() = default;
  virtual HttpResponse handle(const HttpRequest& request) = 0;
};

/// POST /verify    verification_request -> 200 trust_voucher | 403 verification_rejection
///                 optional ?deliver_to=<relying party url> posts the voucher there as well
/// POST /provision operator only; returns {device_id, manufacturer_url, secret}
class ManufacturerService final : public Service {
 public:
  using DirectDelivery = std::function<void(const TrustVoucher&, const std::string& relying_party_url)>;

  ManufacturerService(ManufacturerServer& server, const Clock& clock, DirectDelivery direct,
                      std::optional<std::string> operator_token, std::uint64_t provision_seed);

  HttpResponse handle(const HttpRequest& request) override;

 private:
  HttpResponse verify(const HttpRequest& request);
  HttpResponse provision(const HttpRequest& request);

  ManufacturerServer& server_;
  const Clock& clock_;
  DirectDelivery direct_;
  std::optional<std::string> operator_token_;
  std::mutex rng_mutex_;
  Rng provision_rng_;
};

/// POST /session            -> session_offer
/// POST /voucher[?token=T]  trust_voucher -> 200 decision | 403 verification_rejection
/// GET  /decision?token=T   -> decision
class RelyingPartyService final : public Service {
 public:
  RelyingPartyService(RelyingParty& rp, const Clock& clock) : rp_(rp), clock_(clock) {}

  HttpResponse handle(const HttpRequest& request) override;

 private:
  RelyingParty& rp_;
  const Clock& clock_;
};

/// Client side of the HTTP surface. `base_url` is the peer's advertised URL.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const std::string& base_url, const HttpRequest& request) = 0;
};

/// Dispatches straight into registered services; no sockets.
class InProcessTransport final : public Transport {
 public:
  void route(const std::string& base_url, Service& service) { routes_[base_url] = &service; }
  HttpResponse send(const std::string& base_url, const HttpRequest& request) override;

 private:
  std::map<std::string, Service*> routes_;
};

/// Loopback HTTP client. Logical URLs can be pinned to a local port;
/// anything else must be an `http://host:port` URL.
class HttpTransport final : public Transport {
 public:
  HttpTransport();
  ~HttpTransport() override;

  void route(const std::string& base_url, const std::string& host, int port);
  HttpResponse send(const std::string& base_url, const HttpRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs a Service on a background HTTP listener. Port 0 binds an ephemeral
/// port. Throws BindFailure.
class HttpHost {
 public:
  HttpHost(Service& service, const std::string& host, int port);
  ~HttpHost();
  HttpHost(const HttpHost&) = delete;
  HttpHost& operator=(const HttpHost&) = delete;

  int port() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Splits `http://host:port[/...]`; nullopt for anything else.
std::optional<std::pair<std::string, int>> parse_http_url(const std::string& url);

}  // namespace trustware
