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

#include "s3mirror/durable/types.hpp"

#include <algorithm>
#include <cmath>

namespace s3mirror::durable {

std::string_view to_string(WorkflowStatus s) {
  switch (s) {
    case WorkflowStatus::Pending: return "PENDING";
    case WorkflowStatus::Success: return "SUCCESS";
    case WorkflowStatus::Error: return "ERROR";
  }
  return "PENDING";
}

std::string_view to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Pending: return "PENDING";
    case StepStatus::Running: return "RUNNING";
    case StepStatus::Success: return "SUCCESS";
    case StepStatus::Error: return "ERROR";
  }
  return "PENDING";
}

WorkflowStatus workflow_status_from(std::string_view s) {
  if (s == "SUCCESS") return WorkflowStatus::Success;
  if (s == "ERROR") return WorkflowStatus::Error;
  return WorkflowStatus::Pending;
}

StepStatus step_status_from(std::string_view s) {
  if (s == "RUNNING") return StepStatus::Running;
  if (s == "SUCCESS") return StepStatus::Success;
  if (s == "ERROR") return StepStatus::Error;
  return StepStatus::Pending;
}

void QueueConfig::validate() const {
  if (concurrency <= 0 || worker_concurrency <= 0)
    throw std::invalid_argument("queue concurrency values must be positive");
  if (worker_concurrency > concurrency)
    throw std::invalid_argument("worker_concurrency must not exceed concurrency");
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
  double ms = static_cast<double>(base_delay.count()) *
              std::pow(backoff_factor, std::max(0, attempt - 1));
  ms = std::min(ms, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(ms)));
}

void RetryPolicy::validate() const {
  if (max_attempts <= 0) throw std::invalid_argument("max_attempts must be positive");
  if (!(backoff_factor > 1.0)) throw std::invalid_argument("backoff_factor must exceed 1");
  if (base_delay.count() < 0 || max_delay < base_delay)
    throw std::invalid_argument("retry delays must satisfy 0 <= base_delay <= max_delay");
}

}  // namespace s3mirror::durable
