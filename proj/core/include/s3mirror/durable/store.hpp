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

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "s3mirror/durable/types.hpp"

namespace s3mirror::durable {

namespace sql {
class Db;
}

/// Four-table relational store (workflows, steps, queue, events) shared by
/// every worker on the host. All mutations run in BEGIN IMMEDIATE
/// transactions so claims and status transitions are atomic across threads
/// and processes. Reads use a separate connection and never wait on writers.
class DurableStore {
 public:
  explicit DurableStore(const std::string& path, int busy_timeout_ms = 30'000);
  ~DurableStore();
  DurableStore(const DurableStore&) = delete;
  DurableStore& operator=(const DurableStore&) = delete;

  const std::string& path() const { return path_; }

  // Workflows.

  /// Inserts a PENDING workflow. If the id already exists with the same name
  /// and input the stored record is returned and `inserted` is false;
  /// a mismatch throws WorkflowConflict.
  struct InsertResult {
    WorkflowRecord record;
    bool inserted = false;
  };
  InsertResult insert_workflow(const WorkflowRecord& record);

  std::optional<WorkflowRecord> get_workflow(const Uuid& id) const;
  std::vector<WorkflowRecord> list_workflows(std::optional<WorkflowStatus> status = {}) const;
  std::vector<WorkflowRecord> children_of(const Uuid& parent) const;

  /// PENDING -> SUCCESS/ERROR. Returns false if the workflow was already terminal.
  bool finish_workflow(const Uuid& id, WorkflowStatus status, const std::optional<Payload>& output,
                       const std::optional<std::string>& error);

  // Queue.

  /// Creates the child workflow, its queue entry and the parent's enqueue
  /// step record in one transaction. The child id is derived from
  /// (parent, seq), so replaying the same enqueue returns the same child.
  WorkflowRecord enqueue_child(const Uuid& parent, std::int64_t seq, const std::string& queue_name,
                               const std::string& step_name, const Payload& input);

  /// Enqueue without a parent workflow.
  WorkflowRecord enqueue(const std::string& queue_name, const std::string& step_name,
                         const Payload& input, std::optional<Uuid> id = {});

  /// Atomically claims the oldest unclaimed entry, honouring both the
  /// queue-wide and the per-worker concurrency ceilings.
  std::optional<QueueEntry> claim_next(const std::string& queue_name, const std::string& worker_id,
                                       const QueueConfig& config);

  /// Drops a claim without completing it; the entry keeps its FIFO position.
  void release_claim(const Uuid& workflow_id);

  /// Records the queued workflow's terminal status and removes its queue entry.
  void finish_queued(const Uuid& workflow_id, WorkflowStatus status,
                     const std::optional<Payload>& output, const std::optional<std::string>& error);

  std::vector<QueueEntry> list_queue(const std::string& queue_name) const;
  int count_claimed(const std::string& queue_name, const std::optional<std::string>& worker) const;

  // Steps.

  std::optional<StepRecord> get_step(const Uuid& workflow_id, std::int64_t seq) const;
  /// Marks the step RUNNING with the given attempt number.
  void begin_attempt(const Uuid& workflow_id, std::int64_t seq, const std::string& name,
                     int attempt);
  /// Records a terminal step outcome. A step already in SUCCESS is left untouched.
  void record_step(const Uuid& workflow_id, std::int64_t seq, StepStatus status,
                   const Payload& output_or_error, int attempts);

  // Events.

  /// Upserts (workflow_id, key) with version = previous + 1 and returns it.
  std::int64_t set_event(const Uuid& workflow_id, const std::string& key, const Payload& value);
  std::optional<EventRecord> get_event(const Uuid& workflow_id, const std::string& key) const;

  // Handles and liveness.

  std::vector<HandleStatus> poll(std::span<const Uuid> ids) const;

  void heartbeat(const std::string& worker_id, std::int64_t now);

  struct Adoption {
    /// Top-level workflows now executed by the adopting worker.
    std::vector<Uuid> workflows;
    /// Queued workflows whose stale claims were released back to the queue.
    std::vector<Uuid> released;
  };
  /// Takes over work whose executor stopped heartbeating before `stale_before`.
  /// With `include_own`, records owned by `worker_id` itself (a previous
  /// life of this worker) are adopted regardless of heartbeat age.
  Adoption adopt_stale(const std::string& worker_id, std::int64_t now, std::int64_t stale_before,
                       bool include_own);

 private:
  std::string path_;
  std::unique_ptr<sql::Db> writer_;
  std::unique_ptr<sql::Db> reader_;
  mutable std::mutex write_mu_;
  mutable std::mutex read_mu_;
};

}  // namespace s3mirror::durable
