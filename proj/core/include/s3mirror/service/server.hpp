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

#include <memory>
#include <string>

#include "s3mirror/transfer/engine.hpp"

namespace s3mirror::service {

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 6380;

  /// Accepts "host:port", ":port" or "port". Throws std::invalid_argument.
  static ListenAddress parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

struct ServerOptions {
  ListenAddress listen;
  /// Enables POST /crash.
  bool test_mode = false;
  int threads = 8;
};

/// HTTP control plane:
///   POST /start_transfer          -> {"workflow_id": ...}
///   GET  /transfer_status/{uuid}  -> TransferStatusSnapshot
///   POST /crash                   -> process exits with status 1 (test mode only)
///   GET  /healthz
class Server {
 public:
  Server(transfer::TransferEngine& engine, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and serves on a background thread. Returns the bound port (useful
  /// with port 0). Throws std::runtime_error when the bind fails.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace s3mirror::service
