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
#include <cstdint>
#include <exception>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "s3mirror/common/uuid.hpp"

namespace s3mirror::durable {

/// Opaque serialized payload. Stored as JSON text.
using Payload = nlohmann::json;

enum class WorkflowStatus { Pending, Success, Error };
enum class StepStatus { Pending, Running, Success, Error };

std::string_view to_string(WorkflowStatus s);
std::string_view to_string(StepStatus s);
WorkflowStatus workflow_status_from(std::string_view s);
StepStatus step_status_from(std::string_view s);

struct WorkflowRecord {
  Uuid workflow_id;
  std::string name;
  Payload input;
  WorkflowStatus status = WorkflowStatus::Pending;
  std::optional<Payload> output;
  std::optional<std::string> error;
  std::optional<Uuid> parent_id;
  std::optional<std::string> queue_name;
  std::optional<std::string> executor_id;
  std::int64_t created_at = 0;
  std::int64_t updated_at = 0;
};

struct StepRecord {
  Uuid workflow_id;
  std::int64_t step_seq = 0;
  std::string name;
  StepStatus status = StepStatus::Pending;
  Payload output_or_error;
  int attempts = 0;
  std::optional<std::int64_t> started_at;
  std::optional<std::int64_t> finished_at;
};

struct QueueEntry {
  std::int64_t seq = 0;
  std::string queue_name;
  Uuid workflow_id;
  std::optional<std::string> claimed_by;
  std::optional<std::int64_t> claimed_at;
  std::optional<std::int64_t> heartbeat_at;
};

struct QueueConfig {
  int concurrency = 1;
  int worker_concurrency = 1;

  /// Throws std::invalid_argument unless 0 < worker_concurrency <= concurrency.
  void validate() const;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{500};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_delay{10'000};
  /// Decides whether a thrown error may be retried. Unset means everything is.
  std::function<bool(const std::exception_ptr&)> is_retryable;

  /// Delay slept after failed attempt `attempt` (1-based):
  /// min(base_delay * backoff_factor^(attempt-1), max_delay).
  std::chrono::milliseconds delay_after(int attempt) const;
  void validate() const;
};

struct EventRecord {
  Uuid workflow_id;
  std::string key;
  Payload value;
  std::int64_t version = 0;
};

/// Snapshot of a child workflow as seen through its handle.
struct HandleStatus {
  Uuid workflow_id;
  WorkflowStatus status = WorkflowStatus::Pending;
  bool claimed = false;
  std::optional<StepStatus> step_status;
  int attempts = 0;
  std::optional<Payload> output;
  std::optional<std::string> error;
  std::optional<std::int64_t> started_at;
  std::optional<std::int64_t> finished_at;
};

class DurableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownWorkflowName : public DurableError {
 public:
  explicit UnknownWorkflowName(const std::string& name)
      : DurableError("unknown workflow or step name: " + name) {}
};

class WorkflowConflict : public DurableError {
 public:
  explicit WorkflowConflict(const Uuid& id)
      : DurableError("workflow " + id.str() + " already exists with different input") {}
};

class UnknownWorkflow : public DurableError {
 public:
  explicit UnknownWorkflow(const Uuid& id) : DurableError("unknown workflow " + id.str()) {}
};

class StoreFailure : public DurableError {
 public:
  using DurableError::DurableError;
};

/// Thrown out of workflow and step code when the runtime is shutting down.
/// Durable state is left as it was, exactly as after a crash.
class Cancelled : public std::runtime_error {
 public:
  Cancelled() : std::runtime_error("runtime shutting down") {}
};

}  // namespace s3mirror::durable
