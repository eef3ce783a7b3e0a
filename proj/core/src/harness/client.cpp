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

#include "s3mirror/harness/client.hpp"

#include <httplib.h>

#include <thread>

namespace s3mirror::harness {

struct ServiceClient::Impl {
  httplib::Client http;
  Impl(const std::string& host, int port) : http(host, port) {}
};

namespace {

HttpReply to_reply(const httplib::Result& r) {
  if (!r) return {};
  return HttpReply{r->status, r->body};
}

}  // namespace

ServiceClient::ServiceClient(const std::string& host, int port, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(host, port)) {
  impl_->http.set_connection_timeout(timeout);
  impl_->http.set_read_timeout(timeout);
}

ServiceClient::~ServiceClient() = default;

HttpReply ServiceClient::start_transfer(const nlohmann::json& request) {
  return to_reply(impl_->http.Post("/start_transfer", request.dump(), "application/json"));
}

HttpReply ServiceClient::transfer_status(const Uuid& id) {
  return to_reply(impl_->http.Get("/transfer_status/" + id.str()));
}

HttpReply ServiceClient::crash() { return to_reply(impl_->http.Post("/crash", "", "application/json")); }

bool ServiceClient::healthy() { return to_reply(impl_->http.Get("/healthz")).ok(); }

bool ServiceClient::wait_healthy(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    if (healthy()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  return false;
}

std::optional<transfer::TransferStatusSnapshot> ServiceClient::snapshot(const Uuid& id) {
  auto reply = transfer_status(id);
  if (reply.status != 200) return std::nullopt;
  return nlohmann::json::parse(reply.body).get<transfer::TransferStatusSnapshot>();
}

}  // namespace s3mirror::harness
