// Copyright 2026 The s3mirror Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "s3mirror/service/server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cstdlib>
#include <thread>

namespace s3mirror::service {

using nlohmann::json;

ListenAddress ListenAddress::parse(const std::string& text) {
  ListenAddress a;
  std::string port = text;
  if (auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) a.host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  int value = -1;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value < 0 || value > 65535)
    throw std::invalid_argument("invalid listen address '" + text + "'");
  a.port = value;
  return a;
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, json{{"error", message}});
}

}  // namespace

struct Server::Impl {
  transfer::TransferEngine& engine;
  ServerOptions options;
  httplib::Server http;
  std::thread thread;
  int bound_port = -1;

  Impl(transfer::TransferEngine& e, ServerOptions o) : engine(e), options(std::move(o)) {
    http.new_task_queue = [n = options.threads] { return new httplib::ThreadPool(n); };
    http.Post("/start_transfer", [this](const auto& req, auto& res) { start_transfer(req, res); });
    http.Get(R"(/transfer_status/([^/]+))",
             [this](const auto& req, auto& res) { transfer_status(req, res); });
    http.Post("/crash", [this](const auto&, auto& res) {
      if (!options.test_mode) return reply_error(res, 403, "crash endpoint requires MIRROR_TEST_MODE=1");
      spdlog::warn("crash requested, exiting");
      std::_Exit(1);
    });
    http.Get("/healthz", [](const auto&, auto& res) { reply(res, 200, json{{"status", "ok"}}); });
  }

  void start_transfer(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      return reply_error(res, 400, std::string("malformed JSON: ") + e.what());
    }
    if (!body.is_object()) return reply_error(res, 400, "request body must be a JSON object");
    std::optional<Uuid> id;
    transfer::TransferRequest request;
    try {
      if (auto it = body.find("workflow_id"); it != body.end() && !it->is_null()) {
        id = Uuid::parse(it->get<std::string>());
        if (!id) return reply_error(res, 400, "workflow_id is not a UUID");
      }
      request = engine.request_from_json(body);
      auto handle = engine.start(request, id);
      reply(res, 200, json{{"workflow_id", handle.id().str()}});
    } catch (const durable::WorkflowConflict& e) {
      reply_error(res, 409, e.what());
    } catch (const transfer::InvalidRequest& e) {
      reply_error(res, 400, e.what());
    } catch (const json::exception& e) {
      reply_error(res, 400, std::string("invalid request: ") + e.what());
    } catch (const std::exception& e) {
      spdlog::error("start_transfer failed: {}", e.what());
      reply_error(res, 500, e.what());
    }
  }

  void transfer_status(const httplib::Request& req, httplib::Response& res) {
    auto id = Uuid::parse(req.matches[1].str());
    if (!id) return reply_error(res, 404, "not found");
    try {
      auto snap = engine.status(*id);
      if (!snap) return reply_error(res, 404, "not found");
      reply(res, 200, json(*snap));
    } catch (const std::exception& e) {
      spdlog::error("transfer_status failed: {}", e.what());
      reply_error(res, 500, e.what());
    }
  }

  void bind() {
    const auto& l = options.listen;
    if (l.port == 0) {
      bound_port = http.bind_to_any_port(l.host);
    } else {
      bound_port = http.bind_to_port(l.host, l.port) ? l.port : -1;
    }
    if (bound_port < 0) throw std::runtime_error("cannot listen on " + l.str());
    spdlog::info("listening on {}:{}", l.host, bound_port);
  }
};

Server::Server(transfer::TransferEngine& engine, ServerOptions options)
    : impl_(std::make_unique<Impl>(engine, std::move(options))) {}

Server::~Server() { stop(); }

int Server::start() {
  impl_->bind();
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return impl_->bound_port;
}

void Server::run() {
  impl_->bind();
  impl_->http.listen_after_bind();
}

void Server::stop() {
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Server::port() const { return impl_->bound_port; }

}  // namespace s3mirror::service
