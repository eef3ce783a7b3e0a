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

#include "s3mirror/durable/runtime.hpp"

#include <spdlog/spdlog.h>

#include "s3mirror/common/clock.hpp"

namespace s3mirror::durable {

namespace {

std::string describe(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

WorkflowRecord WorkflowHandle::record() const {
  auto rec = store_->get_workflow(id_);
  if (!rec) throw UnknownWorkflow(id_);
  return *rec;
}

std::optional<WorkflowRecord> WorkflowHandle::wait(std::chrono::milliseconds timeout,
                                                   std::chrono::milliseconds every) const {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    auto rec = record();
    if (rec.status != WorkflowStatus::Pending) return rec;
    if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
    std::this_thread::sleep_for(every);
  }
}

bool StepContext::stopping() const { return rt_.stopping(); }

void StepContext::throw_if_stopping() const {
  if (rt_.stopping()) throw Cancelled();
}

WorkflowHandle WorkflowContext::enqueue(const std::string& queue_name, const std::string& step_name,
                                        const Payload& input) {
  if (rt_.stopping()) throw Cancelled();
  auto child = rt_.store().enqueue_child(record_.workflow_id, next_seq_++, queue_name, step_name, input);
  rt_.enqueue_notify();
  return WorkflowHandle(rt_.store_ptr(), child.workflow_id);
}

Payload WorkflowContext::run_step(const std::string& name,
                                  const std::function<Payload(StepContext&)>& body,
                                  const RetryPolicy& policy) {
  return rt_.run_step(record_.workflow_id, next_seq_++, name, body, policy);
}

std::int64_t WorkflowContext::set_event(const std::string& key, const Payload& value) {
  return rt_.set_event(record_.workflow_id, key, value);
}

std::vector<HandleStatus> WorkflowContext::poll(std::span<const WorkflowHandle> handles) const {
  std::vector<Uuid> ids;
  ids.reserve(handles.size());
  for (const auto& h : handles) ids.push_back(h.id());
  return rt_.store().poll(ids);
}

void WorkflowContext::sleep(std::chrono::milliseconds d) {
  if (!rt_.sleep_for(d)) throw Cancelled();
}

bool WorkflowContext::stopping() const { return rt_.stopping(); }

Runtime::Runtime(RuntimeOptions options)
    : options_(std::move(options)), store_(std::make_shared<DurableStore>(options_.db_path)) {}

Runtime::~Runtime() { shutdown(); }

void Runtime::register_workflow(const std::string& name, WorkflowFn fn) {
  workflows_[name] = std::move(fn);
}

void Runtime::register_step(const std::string& name, StepFn fn, RetryPolicy policy) {
  policy.validate();
  steps_[name] = StepEntry{std::move(fn), std::move(policy)};
}

void Runtime::register_queue(const std::string& name, QueueConfig config) {
  config.validate();
  queues_[name] = config;
}

RecoveryReport Runtime::launch() {
  if (launched_.exchange(true)) return {};
  RecoveryReport report = recover_pending();
  for (const auto& [name, config] : queues_) {
    for (int i = 0; i < config.worker_concurrency; ++i) {
      start_thread([this, name = name, config = config] { queue_worker(name, config); });
    }
  }
  start_thread([this] { heartbeat_loop(); });
  return report;
}

void Runtime::shutdown() {
  {
    std::lock_guard lk(mu_);
    stopping_.store(true);
  }
  cv_.notify_all();
  std::vector<Worker> threads;
  {
    std::lock_guard lk(threads_mu_);
    threads.swap(threads_);
  }
  for (auto& w : threads)
    if (w.thread.joinable()) w.thread.join();
}

void Runtime::start_thread(std::function<void()> body) {
  auto done = std::make_shared<std::atomic<bool>>(false);
  std::lock_guard lk(threads_mu_);
  if (stopping()) return;
  std::erase_if(threads_, [](Worker& w) {
    if (!w.done->load()) return false;
    w.thread.join();
    return true;
  });
  threads_.push_back(Worker{std::thread([body = std::move(body), done] {
                              body();
                              done->store(true);
                            }),
                            done});
}

WorkflowHandle Runtime::start_workflow(const std::string& name, const Payload& input,
                                       std::optional<Uuid> workflow_id) {
  if (!workflows_.contains(name)) throw UnknownWorkflowName(name);
  WorkflowRecord rec;
  rec.workflow_id = workflow_id.value_or(Uuid::random());
  rec.name = name;
  rec.input = input;
  rec.executor_id = options_.worker_id;
  rec.created_at = rec.updated_at = now_ms();
  auto result = store_->insert_workflow(rec);
  if (result.inserted) spawn_workflow(rec.workflow_id);
  return WorkflowHandle(store_, rec.workflow_id);
}

WorkflowHandle Runtime::enqueue(const std::string& queue_name, const std::string& step_name,
                                const Payload& input) {
  if (!queues_.contains(queue_name)) throw DurableError("unknown queue: " + queue_name);
  auto rec = store_->enqueue(queue_name, step_name, input);
  enqueue_notify();
  return WorkflowHandle(store_, rec.workflow_id);
}

void Runtime::enqueue_notify() {
  {
    std::lock_guard lk(mu_);
    ++queue_generation_;
  }
  cv_.notify_all();
}

bool Runtime::sleep_for(std::chrono::milliseconds d) const {
  std::unique_lock lk(mu_);
  return !cv_.wait_for(lk, d, [this] { return stopping_.load(); });
}

Payload Runtime::run_step(const Uuid& workflow_id, std::int64_t seq, const std::string& name,
                          const std::function<Payload(StepContext&)>& body,
                          const RetryPolicy& policy) {
  int attempt = 1;
  if (auto prior = store_->get_step(workflow_id, seq)) {
    if (prior->status == StepStatus::Success) return prior->output_or_error;
    if (prior->status == StepStatus::Error) {
      const auto& e = prior->output_or_error;
      throw StepFailed(e.value("error", std::string("step failed")), prior->attempts,
                       e.value("permanent", false));
    }
    // Interrupted mid-attempt in a previous life: redo that attempt.
    attempt = std::max(1, prior->attempts);
  }
  for (;; ++attempt) {
    if (stopping()) throw Cancelled();
    store_->begin_attempt(workflow_id, seq, name, attempt);
    std::exception_ptr failure;
    try {
      StepContext ctx(*this, workflow_id, attempt);
      Payload out = body(ctx);
      store_->record_step(workflow_id, seq, StepStatus::Success, out, attempt);
      return out;
    } catch (const Cancelled&) {
      throw;
    } catch (...) {
      failure = std::current_exception();
    }
    const bool retryable = policy.is_retryable ? policy.is_retryable(failure) : true;
    const std::string message = describe(failure);
    if (!retryable || attempt >= policy.max_attempts) {
      store_->record_step(workflow_id, seq, StepStatus::Error,
                          Payload{{"error", message}, {"permanent", !retryable}}, attempt);
      throw StepFailed(message, attempt, !retryable);
    }
    spdlog::debug("step {} of {} attempt {} failed, retrying: {}", name, workflow_id.str(), attempt,
                  message);
    if (!sleep_for(policy.delay_after(attempt))) throw Cancelled();
  }
}

RecoveryReport Runtime::recover_pending() { return adopt(/*include_own=*/true); }

RecoveryReport Runtime::adopt(bool include_own) {
  const std::int64_t now = now_ms();
  auto adoption = store_->adopt_stale(options_.worker_id, now, now - options_.stale_after.count(),
                                      include_own);
  RecoveryReport report;
  for (const auto& id : adoption.workflows) {
    auto rec = store_->get_workflow(id);
    if (!rec) continue;
    if (!workflows_.contains(rec->name)) {
      report.unrecoverable.emplace_back(id, "no workflow registered as '" + rec->name + "'");
      spdlog::warn("cannot recover workflow {}: unregistered name {}", id.str(), rec->name);
      continue;
    }
    spawn_workflow(id);
    report.handles.emplace_back(store_, id);
  }
  for (const auto& id : adoption.released) report.handles.emplace_back(store_, id);
  if (!adoption.released.empty()) enqueue_notify();
  if (!report.handles.empty())
    spdlog::info("worker {} recovered {} workflows and {} queued steps", options_.worker_id,
                 adoption.workflows.size(), adoption.released.size());
  return report;
}

void Runtime::spawn_workflow(const Uuid& id) {
  if (stopping()) return;
  start_thread([this, id] { execute_workflow(id); });
}

void Runtime::execute_workflow(const Uuid& id) {
  std::optional<WorkflowRecord> rec;
  try {
    rec = store_->get_workflow(id);
  } catch (const std::exception& e) {
    spdlog::error("cannot load workflow {}: {}", id.str(), e.what());
    return;
  }
  if (!rec || rec->status != WorkflowStatus::Pending) return;
  auto it = workflows_.find(rec->name);
  if (it == workflows_.end()) return;
  WorkflowContext ctx(*this, *rec);
  try {
    Payload out = it->second(ctx, rec->input);
    store_->finish_workflow(id, WorkflowStatus::Success, out, std::nullopt);
  } catch (const Cancelled&) {
    // Left PENDING for recovery.
  } catch (const std::exception& e) {
    if (stopping()) return;
    spdlog::error("workflow {} ({}) failed: {}", id.str(), rec->name, e.what());
    store_->finish_workflow(id, WorkflowStatus::Error, std::nullopt, std::string(e.what()));
  }
}

void Runtime::queue_worker(const std::string& queue_name, QueueConfig config) {
  std::uint64_t seen = 0;
  while (!stopping()) {
    std::optional<QueueEntry> entry;
    try {
      entry = store_->claim_next(queue_name, options_.worker_id, config);
    } catch (const std::exception& e) {
      spdlog::warn("claim on {} failed: {}", queue_name, e.what());
    }
    if (entry) {
      execute_queued(*entry);
      continue;
    }
    std::unique_lock lk(mu_);
    cv_.wait_for(lk, options_.idle_poll,
                 [&] { return stopping_.load() || queue_generation_ != seen; });
    seen = queue_generation_;
  }
}

void Runtime::execute_queued(const QueueEntry& entry) {
  const Uuid& id = entry.workflow_id;
  try {
    auto rec = store_->get_workflow(id);
    if (!rec) {
      store_->finish_queued(id, WorkflowStatus::Error, std::nullopt, "missing workflow record");
      return;
    }
    if (rec->status != WorkflowStatus::Pending) {
      store_->finish_queued(id, rec->status, rec->output, rec->error);
      return;
    }
    auto it = steps_.find(rec->name);
    if (it == steps_.end()) {
      // Another process may know this step; give it back.
      store_->release_claim(id);
      spdlog::warn("no step registered as '{}', releasing {}", rec->name, id.str());
      sleep_for(options_.idle_poll);
      return;
    }
    const StepEntry& step = it->second;
    try {
      Payload out = run_step(
          id, 0, rec->name, [&](StepContext& ctx) { return step.fn(ctx, rec->input); },
          step.policy);
      store_->finish_queued(id, WorkflowStatus::Success, out, std::nullopt);
    } catch (const StepFailed& e) {
      store_->finish_queued(id, WorkflowStatus::Error, std::nullopt, std::string(e.what()));
    }
    enqueue_notify();
  } catch (const Cancelled&) {
    // Claim stays with this worker id; recovery releases it.
  } catch (const std::exception& e) {
    spdlog::error("queued workflow {} aborted: {}", id.str(), e.what());
  }
}

void Runtime::heartbeat_loop() {
  while (sleep_for(options_.heartbeat_interval)) {
    try {
      store_->heartbeat(options_.worker_id, now_ms());
      adopt(/*include_own=*/false);
    } catch (const std::exception& e) {
      spdlog::warn("heartbeat failed: {}", e.what());
    }
  }
}

std::int64_t Runtime::set_event(const Uuid& workflow_id, const std::string& key,
                                const Payload& value) {
  return store_->set_event(workflow_id, key, value);
}

std::optional<Payload> Runtime::get_event(const Uuid& workflow_id, const std::string& key) const {
  auto e = store_->get_event(workflow_id, key);
  if (!e) return std::nullopt;
  return e->value;
}

}  // namespace s3mirror::durable
