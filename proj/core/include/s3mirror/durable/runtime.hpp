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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "s3mirror/durable/store.hpp"
#include "s3mirror/durable/types.hpp"

namespace s3mirror::durable {

struct RuntimeOptions {
  std::string db_path;
  /// Identity written into claims and executor columns. Must be unique among
  /// live processes; reusing it after a crash lets the new process adopt its
  /// predecessor's work immediately.
  std::string worker_id = "local";
  std::chrono::milliseconds heartbeat_interval{2'000};
  std::chrono::milliseconds stale_after{10'000};
  /// Fallback poll period for queue work enqueued by other processes.
  std::chrono::milliseconds idle_poll{50};
};

class WorkflowHandle {
 public:
  WorkflowHandle(std::shared_ptr<DurableStore> store, Uuid id)
      : store_(std::move(store)), id_(id) {}

  const Uuid& id() const { return id_; }
  WorkflowRecord record() const;
  WorkflowStatus status() const { return record().status; }

  /// Polls until the workflow is terminal. Returns nullopt on timeout.
  std::optional<WorkflowRecord> wait(std::chrono::milliseconds timeout,
                                     std::chrono::milliseconds every = std::chrono::milliseconds(20)) const;

 private:
  std::shared_ptr<DurableStore> store_;
  Uuid id_;
};

/// Raised by run_step when a step ends in ERROR, either now or in a previous life.
class StepFailed : public DurableError {
 public:
  StepFailed(const std::string& message, int attempts, bool permanent)
      : DurableError(message), attempts_(attempts), permanent_(permanent) {}
  int attempts() const { return attempts_; }
  bool permanent() const { return permanent_; }

 private:
  int attempts_;
  bool permanent_;
};

class Runtime;

class StepContext {
 public:
  StepContext(const Runtime& rt, Uuid workflow_id, int attempt)
      : rt_(rt), workflow_id_(workflow_id), attempt_(attempt) {}
  const Uuid& workflow_id() const { return workflow_id_; }
  int attempt() const { return attempt_; }
  bool stopping() const;
  void throw_if_stopping() const;

 private:
  const Runtime& rt_;
  Uuid workflow_id_;
  int attempt_;
};

class WorkflowContext {
 public:
  WorkflowContext(Runtime& rt, WorkflowRecord record) : rt_(rt), record_(std::move(record)) {}

  const Uuid& workflow_id() const { return record_.workflow_id; }
  const WorkflowRecord& record() const { return record_; }

  /// Durable enqueue. Replays of the same workflow map each call, by order,
  /// to the same child workflow.
  WorkflowHandle enqueue(const std::string& queue_name, const std::string& step_name,
                         const Payload& input);
  Payload run_step(const std::string& name, const std::function<Payload(StepContext&)>& body,
                   const RetryPolicy& policy);
  std::int64_t set_event(const std::string& key, const Payload& value);
  std::vector<HandleStatus> poll(std::span<const WorkflowHandle> handles) const;

  /// Sleeps unless the runtime stops first, in which case Cancelled is thrown.
  void sleep(std::chrono::milliseconds d);
  bool stopping() const;

 private:
  Runtime& rt_;
  WorkflowRecord record_;
  std::int64_t next_seq_ = 0;
};

using WorkflowFn = std::function<Payload(WorkflowContext&, const Payload&)>;
using StepFn = std::function<Payload(StepContext&, const Payload&)>;

struct RecoveryReport {
  std::vector<WorkflowHandle> handles;
  /// Adopted records this process cannot run (unregistered name), with the reason.
  std::vector<std::pair<Uuid, std::string>> unrecoverable;
};

/// One worker: executes workflows started or recovered here and drains the
/// registered queues with a fixed pool of threads per queue.
class Runtime {
 public:
  explicit Runtime(RuntimeOptions options);
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  void register_workflow(const std::string& name, WorkflowFn fn);
  void register_step(const std::string& name, StepFn fn, RetryPolicy policy);
  void register_queue(const std::string& name, QueueConfig config);

  /// Recovers pending work, then starts queue workers and the heartbeat.
  RecoveryReport launch();
  /// Stops all threads. Durable state is left exactly as a crash would leave it.
  void shutdown();

  WorkflowHandle start_workflow(const std::string& name, const Payload& input,
                                std::optional<Uuid> workflow_id = {});
  WorkflowHandle enqueue(const std::string& queue_name, const std::string& step_name,
                         const Payload& input);

  /// Runs a step body with at-least-once / no-repeat semantics. A recorded
  /// SUCCESS is returned without running the body; a recorded ERROR is
  /// rethrown as StepFailed.
  Payload run_step(const Uuid& workflow_id, std::int64_t seq, const std::string& name,
                   const std::function<Payload(StepContext&)>& body, const RetryPolicy& policy);

  /// Adopts this worker's previous-life work and any stale work of others.
  RecoveryReport recover_pending();

  std::int64_t set_event(const Uuid& workflow_id, const std::string& key, const Payload& value);
  std::optional<Payload> get_event(const Uuid& workflow_id, const std::string& key) const;

  DurableStore& store() { return *store_; }
  const std::shared_ptr<DurableStore>& store_ptr() const { return store_; }
  const RuntimeOptions& options() const { return options_; }
  bool stopping() const { return stopping_.load(); }

  /// Interruptible sleep; returns false if the runtime began stopping.
  bool sleep_for(std::chrono::milliseconds d) const;
  /// Wakes idle queue workers in this process.
  void enqueue_notify();

 private:
  struct StepEntry {
    StepFn fn;
    RetryPolicy policy;
  };

  RecoveryReport adopt(bool include_own);
  void spawn_workflow(const Uuid& id);
  void execute_workflow(const Uuid& id);
  void queue_worker(const std::string& queue_name, QueueConfig config);
  void execute_queued(const QueueEntry& entry);
  void heartbeat_loop();

  RuntimeOptions options_;
  std::shared_ptr<DurableStore> store_;

  std::map<std::string, WorkflowFn> workflows_;
  std::map<std::string, StepEntry> steps_;
  std::map<std::string, QueueConfig> queues_;

  std::atomic<bool> stopping_{false};
  std::atomic<bool> launched_{false};
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::uint64_t queue_generation_ = 0;

  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };
  void start_thread(std::function<void()> body);

  std::mutex threads_mu_;
  std::vector<Worker> threads_;
};

}  // namespace s3mirror::durable
