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

// cpp-httplib is confined to this translation unit.
#include "httplib.h"
#include "trustware/service.hpp"

#include <thread>

namespace trustware {

struct HttpTransport::Impl {
  std::mutex mutex;
  std::map<std::string, std::pair<std::string, int>> routes;
  std::map<std::pair<std::string, int>, std::unique_ptr<httplib::Client>> clients;

  httplib::Client& client_for(const std::pair<std::string, int>& endpoint) {
    auto& c = clients[endpoint];
    if (!c) {
      c = std::make_unique<httplib::Client>(endpoint.first, endpoint.second);
      c->set_keep_alive(true);
      c->set_connection_timeout(2);
      c->set_read_timeout(10);
    }
    return *c;
  }
};

HttpTransport::HttpTransport() : impl_(std::make_unique<Impl>()) {}
HttpTransport::~HttpTransport() = default;

void HttpTransport::route(const std::string& base_url, const std::string& host, int port) {
  std::lock_guard lock(impl_->mutex);
  impl_->routes[base_url] = {host, port};
}

HttpResponse HttpTransport::send(const std::string& base_url, const HttpRequest& request) {
  std::lock_guard lock(impl_->mutex);
  std::pair<std::string, int> endpoint;
  if (auto it = impl_->routes.find(base_url); it != impl_->routes.end()) {
    endpoint = it->second;
  } else if (auto parsed = parse_http_url(base_url)) {
    endpoint = *parsed;
  } else {
    return {0, ""};
  }

  httplib::Params params(request.query.begin(), request.query.end());
  const std::string target =
      params.empty() ? request.path : httplib::append_query_params(request.path, params);
  httplib::Headers headers(request.headers.begin(), request.headers.end());

  auto& client = impl_->client_for(endpoint);
  httplib::Result res = request.method == "GET"
                            ? client.Get(target, headers)
                            : client.Post(target, headers, request.body, "application/json");
  if (!res) return {0, ""};
  return {res->status, res->body};
}

struct HttpHost::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

HttpHost::HttpHost(Service& service, const std::string& host, int port)
    : impl_(std::make_unique<Impl>()) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpRequest request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [k, v] : req.params) request.query[k] = v;
    if (auto auth = req.get_header_value("Authorization"); !auth.empty()) {
      request.headers["Authorization"] = auth;
    }
    request.body = req.body;
    HttpResponse out;
    try {
      out = service.handle(request);
    } catch (const std::exception& e) {
      out = {500, e.what()};
    }
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  // httplib defaults to SO_REUSEPORT, which lets a second listener share a
  // live port instead of failing.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port <= 0) {
    throw Error(Errc::BindFailure, host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

HttpHost::~HttpHost() { stop(); }

int HttpHost::port() const { return impl_->port; }

void HttpHost::stop() {
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

}  // namespace trustware
