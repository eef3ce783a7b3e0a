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

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace s3mirror::harness {

/// A child process started with posix_spawn. Output goes to `log_path`.
/// The destructor kills the child if it is still running.
class ChildProcess {
 public:
  ChildProcess(const std::filesystem::path& binary, const std::vector<std::string>& args,
               const std::map<std::string, std::string>& extra_env,
               const std::filesystem::path& log_path);
  ~ChildProcess();
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  pid_t pid() const { return pid_; }
  bool running();
  /// Raw waitpid status once exited, nullopt on timeout.
  std::optional<int> wait(std::chrono::milliseconds timeout);
  /// SIGTERM, then SIGKILL after `grace`. Returns the raw status.
  int terminate(std::chrono::milliseconds grace = std::chrono::milliseconds(5'000));

 private:
  pid_t pid_ = -1;
  std::optional<int> status_;
};

/// A TCP port that was free on 127.0.0.1 a moment ago.
int pick_free_port();

/// "exit 1", "signal 9", ...
std::string describe_wait_status(int status);

}  // namespace s3mirror::harness
