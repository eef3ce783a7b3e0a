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
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "s3mirror/durable/runtime.hpp"
#include "s3mirror/store/object_store.hpp"
#include "s3mirror/transfer/copy.hpp"
#include "s3mirror/transfer/throttle.hpp"
#include "s3mirror/transfer/types.hpp"

namespace s3mirror::transfer {

inline constexpr const char* kTransferJob = "transfer_job";
inline constexpr const char* kTransferFileStep = "s3_transfer_file";
inline constexpr const char* kTransferQueue = "transfer_q";
inline constexpr const char* kTasksEvent = "tasks";

/// Tunables read from the configuration file at startup.
struct EngineConfig {
  std::uint64_t part_size = 16 * store::kMiB;
  int file_parallelism = 8;
  PartSizeBounds part_size_bounds;
  durable::QueueConfig queue{64, 16};
  ThrottleConfig throttle;
  std::chrono::milliseconds retry_base_delay{500};
  double retry_backoff_factor = 2.0;
  std::chrono::milliseconds retry_max_delay{10'000};
  int retry_max_attempts = 3;
  std::chrono::milliseconds poll_interval{1'000};
  VerifyMode verify = VerifyMode::None;

  durable::RetryPolicy retry_policy() const;
  void validate() const;
};

void to_json(nlohmann::json& j, const EngineConfig& c);
/// Absent fields keep their defaults.
void from_json(const nlohmann::json& j, EngineConfig& c);

/// Wires the transfer workflow, the per-file step and the transfer queue into
/// a durable runtime. Construct before Runtime::launch().
class TransferEngine {
 public:
  TransferEngine(durable::Runtime& runtime, store::ObjectStore& store, EngineConfig config);

  /// Validates, then starts transfer_job asynchronously. Idempotent for a
  /// repeated id with identical request; a different request under the same
  /// id throws durable::WorkflowConflict.
  durable::WorkflowHandle start(const TransferRequest& request,
                                std::optional<Uuid> workflow_id = {});

  /// Latest persisted snapshot, or an all-PENDING one if the job has not
  /// published yet. nullopt for an unknown or non-transfer workflow.
  std::optional<TransferStatusSnapshot> status(const Uuid& workflow_id) const;

  /// Fills unset request tunables from the configuration.
  TransferRequest request_from_json(const nlohmann::json& body) const;

  const EngineConfig& config() const { return config_; }
  Throttle& throttle() { return throttle_; }

 private:
  durable::Payload run_job(durable::WorkflowContext& ctx, const durable::Payload& input);
  durable::Payload run_file(durable::StepContext& ctx, const durable::Payload& input);

  durable::Runtime& runtime_;
  store::ObjectStore& store_;
  EngineConfig config_;
  Throttle throttle_;
};

/// Folds a child handle's durable state into the FileTask the job publishes.
FileTask task_from_handle(const std::string& key, const durable::HandleStatus& handle);

}  // namespace s3mirror::transfer
