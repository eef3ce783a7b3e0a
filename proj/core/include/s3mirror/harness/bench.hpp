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
#include <filesystem>
#include <optional>

#include "s3mirror/harness/dataset.hpp"
#include "s3mirror/harness/report.hpp"
#include "s3mirror/store/fault_plan.hpp"
#include "s3mirror/transfer/engine.hpp"

namespace s3mirror::harness {

struct BenchOptions {
  DatasetSpec dataset;
  transfer::EngineConfig engine;
  store::FaultPlan faults;
  /// Scratch directory for the durable store; a fresh temp dir when unset.
  std::optional<std::filesystem::path> work_dir;
  std::chrono::seconds timeout{600};
  bool verify_content = true;
};

struct BenchResult {
  BenchReport report;
  transfer::TransferStatusSnapshot snapshot;
  /// Keys whose destination hash differs from the source (SUCCESS files only).
  std::vector<std::string> content_mismatches;
};

/// Runs one transfer in-process against an in-memory simulated store.
/// Throws std::runtime_error on timeout.
BenchResult run_bench(const BenchOptions& options);

}  // namespace s3mirror::harness
