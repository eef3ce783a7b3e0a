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

#pragma once

#include <chrono>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "s3mirror/common/uuid.hpp"
#include "s3mirror/transfer/types.hpp"

namespace s3mirror::harness {

struct HttpReply {
  /// 0 when the request did not reach the server.
  int status = 0;
  std::string body;
  bool ok() const { return status >= 200 && status < 300; }
};

/// Blocking JSON client for the service routes. Not thread-safe.
class ServiceClient {
 public:
  ServiceClient(const std::string& host, int port,
                std::chrono::milliseconds timeout = std::chrono::milliseconds(10'000));
  ~ServiceClient();

  HttpReply start_transfer(const nlohmann::json& request);
  HttpReply transfer_status(const Uuid& id);
  /// The server exits without answering, so a status of 0 is the expected outcome.
  HttpReply crash();
  bool healthy();
  /// Polls /healthz until it answers or the timeout elapses.
  bool wait_healthy(std::chrono::milliseconds timeout);

  /// Parsed snapshot, or nullopt on any non-200 reply.
  std::optional<transfer::TransferStatusSnapshot> snapshot(const Uuid& id);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace s3mirror::harness
