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

#include "s3mirror/transfer/engine.hpp"

#include <cmath>

#include "s3mirror/common/clock.hpp"

namespace s3mirror::transfer {

using nlohmann::json;

durable::RetryPolicy EngineConfig::retry_policy() const {
  durable::RetryPolicy p;
  p.max_attempts = retry_max_attempts;
  p.base_delay = retry_base_delay;
  p.backoff_factor = retry_backoff_factor;
  p.max_delay = retry_max_delay;
  p.is_retryable = [](const std::exception_ptr& ep) {
    return classify_error(ep) == ErrorClass::Retryable;
  };
  return p;
}

void EngineConfig::validate() const {
  if (part_size_bounds.min == 0 || part_size_bounds.min > part_size_bounds.max)
    throw std::invalid_argument("part_size bounds must satisfy 0 < min <= max");
  if (part_size < part_size_bounds.min || part_size > part_size_bounds.max)
    throw std::invalid_argument("default part_size outside configured bounds");
  if (file_parallelism < 1) throw std::invalid_argument("file_parallelism must be positive");
  if (poll_interval.count() <= 0) throw std::invalid_argument("poll_interval must be positive");
  queue.validate();
  throttle.validate();
  retry_policy().validate();
}

void to_json(json& j, const EngineConfig& c) {
  j = json{{"part_size", c.part_size},
           {"file_parallelism", c.file_parallelism},
           {"part_size_min", c.part_size_bounds.min},
           {"part_size_max", c.part_size_bounds.max},
           {"queue", {{"concurrency", c.queue.concurrency},
                      {"worker_concurrency", c.queue.worker_concurrency}}},
           {"throttle", {{"global_max_inflight", c.throttle.global_max_inflight},
                         {"per_worker_share", c.throttle.per_worker_share}}},
           {"retry", {{"max_attempts", c.retry_max_attempts},
                      {"base_delay_ms", c.retry_base_delay.count()},
                      {"backoff_factor", c.retry_backoff_factor},
                      {"max_delay_ms", c.retry_max_delay.count()}}},
           {"poll_interval_ms", c.poll_interval.count()},
           {"verify", c.verify == VerifyMode::Size ? "size" : "none"}};
}

void from_json(const json& j, EngineConfig& c) {
  c.part_size = j.value("part_size", c.part_size);
  c.file_parallelism = j.value("file_parallelism", c.file_parallelism);
  c.part_size_bounds.min = j.value("part_size_min", c.part_size_bounds.min);
  c.part_size_bounds.max = j.value("part_size_max", c.part_size_bounds.max);
  if (auto q = j.find("queue"); q != j.end()) {
    c.queue.concurrency = q->value("concurrency", c.queue.concurrency);
    c.queue.worker_concurrency = q->value("worker_concurrency", c.queue.worker_concurrency);
  }
  if (auto t = j.find("throttle"); t != j.end()) {
    const int global = t->value("global_max_inflight", c.throttle.global_max_inflight);
    if (t->contains("max_workers")) {
      c.throttle = ThrottleConfig::partitioned(global, t->at("max_workers").get<int>());
    } else {
      c.throttle.global_max_inflight = global;
      c.throttle.per_worker_share = t->value("per_worker_share", global);
    }
  }
  if (auto r = j.find("retry"); r != j.end()) {
    c.retry_max_attempts = r->value("max_attempts", c.retry_max_attempts);
    c.retry_base_delay = std::chrono::milliseconds(r->value("base_delay_ms", c.retry_base_delay.count()));
    c.retry_backoff_factor = r->value("backoff_factor", c.retry_backoff_factor);
    c.retry_max_delay = std::chrono::milliseconds(r->value("max_delay_ms", c.retry_max_delay.count()));
  }
  c.poll_interval = std::chrono::milliseconds(j.value("poll_interval_ms", c.poll_interval.count()));
  if (j.contains("verify")) {
    const auto v = j.at("verify").get<std::string>();
    if (v == "size") c.verify = VerifyMode::Size;
    else if (v == "none") c.verify = VerifyMode::None;
    else throw std::invalid_argument("verify must be 'none' or 'size'");
  }
}

FileTask task_from_handle(const std::string& key, const durable::HandleStatus& h) {
  FileTask t;
  t.key = key;
  t.attempts = h.attempts;
  const auto seconds = [](std::optional<std::int64_t> ms) -> std::optional<double> {
    if (!ms) return std::nullopt;
    return ms_to_seconds(*ms);
  };
  switch (h.status) {
    case durable::WorkflowStatus::Success: {
      if (h.output) t = h.output->get<FileTask>();
      t.key = key;
      t.status = FileStatus::Success;
      t.attempts = std::max(1, h.attempts);
      t.error.reset();
      // Duration spans the first attempt's head to the completed copy.
      if (h.started_at) t.started_at = ms_to_seconds(*h.started_at);
      if (!t.finished_at) t.finished_at = seconds(h.finished_at);
      if (!t.finished_at) t.finished_at = t.started_at;
      if (t.started_at && t.finished_at)
        t.duration = std::round(std::max(0.0, *t.finished_at - *t.started_at) * 1000.0) / 1000.0;
      else
        t.duration = 0.0;
      break;
    }
    case durable::WorkflowStatus::Error: {
      t.status = FileStatus::Failed;
      t.error = h.error.value_or("step failed");
      t.started_at = seconds(h.started_at);
      t.finished_at = seconds(h.finished_at);
      if (!t.finished_at) t.finished_at = t.started_at;
      t.duration = (t.started_at && t.finished_at)
                       ? std::round((*t.finished_at - *t.started_at) * 1000.0) / 1000.0
                       : 0.0;
      break;
    }
    case durable::WorkflowStatus::Pending: {
      const bool running = h.claimed || h.step_status == durable::StepStatus::Running;
      t.status = running ? FileStatus::InProgress : FileStatus::Pending;
      if (running) t.started_at = seconds(h.started_at);
      break;
    }
  }
  return t;
}

TransferEngine::TransferEngine(durable::Runtime& runtime, store::ObjectStore& store,
                               EngineConfig config)
    : runtime_(runtime),
      store_(store),
      config_(std::move(config)),
      throttle_(config_.throttle.per_worker_share) {
  config_.validate();
  runtime_.register_queue(kTransferQueue, config_.queue);
  runtime_.register_workflow(kTransferJob, [this](durable::WorkflowContext& ctx,
                                                  const durable::Payload& input) {
    return run_job(ctx, input);
  });
  runtime_.register_step(
      kTransferFileStep,
      [this](durable::StepContext& ctx, const durable::Payload& input) { return run_file(ctx, input); },
      config_.retry_policy());
}

TransferRequest TransferEngine::request_from_json(const json& body) const {
  TransferRequest r;
  r.part_size = config_.part_size;
  r.file_parallelism = config_.file_parallelism;
  from_json(body, r);
  return r;
}

durable::WorkflowHandle TransferEngine::start(const TransferRequest& request,
                                              std::optional<Uuid> workflow_id) {
  request.validate(config_.part_size_bounds);
  return runtime_.start_workflow(kTransferJob, json(request), workflow_id);
}

std::optional<TransferStatusSnapshot> TransferEngine::status(const Uuid& workflow_id) const {
  auto record = runtime_.store().get_workflow(workflow_id);
  if (!record || record->name != kTransferJob) return std::nullopt;
  if (auto event = runtime_.store().get_event(workflow_id, kTasksEvent))
    return event->value.get<TransferStatusSnapshot>();

  TransferRequest request;
  from_json(record->input, request);
  std::vector<FileTask> tasks;
  tasks.reserve(request.keys.size());
  for (const auto& key : request.keys) {
    FileTask t;
    t.key = key;
    tasks.push_back(std::move(t));
  }
  auto snap = aggregate_status(tasks, ms_to_seconds(record->created_at), ms_to_seconds(now_ms()));
  snap.workflow_id = workflow_id;
  return snap;
}

durable::Payload TransferEngine::run_job(durable::WorkflowContext& ctx,
                                         const durable::Payload& input) {
  TransferRequest request;
  from_json(input, request);

  std::vector<durable::WorkflowHandle> handles;
  handles.reserve(request.keys.size());
  for (const auto& key : request.keys) {
    handles.push_back(ctx.enqueue(kTransferQueue, kTransferFileStep,
                                  json{{"source_bucket", request.source_bucket},
                                       {"key", key},
                                       {"dest_bucket", request.dest_bucket},
                                       {"dest_key", request.dest_key(key)},
                                       {"part_size", request.part_size},
                                       {"file_parallelism", request.file_parallelism}}));
  }

  const double started_at = ms_to_seconds(ctx.record().created_at);
  for (;;) {
    const auto statuses = ctx.poll(handles);
    std::vector<FileTask> tasks;
    tasks.reserve(statuses.size());
    for (std::size_t i = 0; i < statuses.size(); ++i)
      tasks.push_back(task_from_handle(request.keys[i], statuses[i]));
    auto snap = aggregate_status(tasks, started_at, ms_to_seconds(now_ms()));
    snap.workflow_id = ctx.workflow_id();
    json payload = snap;
    ctx.set_event(kTasksEvent, payload);
    if (snap.complete) return payload;
    ctx.sleep(config_.poll_interval);
  }
}

durable::Payload TransferEngine::run_file(durable::StepContext& ctx, const durable::Payload& input) {
  const store::ObjectRef source{input.at("source_bucket").get<std::string>(),
                                input.at("key").get<std::string>()};
  const store::ObjectRef dest{input.at("dest_bucket").get<std::string>(),
                              input.at("dest_key").get<std::string>()};
  CopyOptions options;
  options.part_size = input.at("part_size").get<std::uint64_t>();
  options.file_parallelism = input.at("file_parallelism").get<int>();
  options.verify = config_.verify;
  options.should_stop = [&ctx] { return ctx.stopping(); };
  FileTask task = s3_transfer_file(store_, source, dest, options, throttle_);
  task.attempts = ctx.attempt();
  return json(task);
}

}  // namespace s3mirror::transfer
