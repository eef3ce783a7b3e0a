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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "s3mirror/common/uuid.hpp"
#include "s3mirror/harness/dataset.hpp"
#include "s3mirror/store/fault_plan.hpp"
#include "s3mirror/transfer/engine.hpp"

namespace s3mirror::harness {

struct ScenarioOptions {
  /// The `mirror` executable; the scenario runs `mirror serve` as a child.
  std::filesystem::path mirror_binary;
  /// Holds the database, the simulated store, configs and logs. Wiped first.
  std::filesystem::path work_dir;
  DatasetSpec dataset = DatasetSpec::fixed(50, 16 * store::kMiB);
  transfer::EngineConfig engine;
  store::FaultPlan faults;
  /// One entry per crash: POST /crash once this many files have a recorded
  /// SUCCESS. 0 crashes right after the job is accepted.
  std::vector<std::size_t> kill_after{30};
  /// When false, the service stays down after the last crash.
  bool restart_after_last = true;
  std::string worker_id = "scenario";
  std::chrono::seconds timeout{120};
  bool verify_content = true;
};

void to_json(nlohmann::json& j, const ScenarioOptions& o);
/// Fields absent from `j` keep their current values.
void from_json(const nlohmann::json& j, ScenarioOptions& o);

struct CrashRecord {
  std::size_t threshold = 0;
  std::string exit;
  bool exited_nonzero = false;
  /// Keys with a recorded SUCCESS when the process died.
  std::set<std::string> success_before;
  std::size_t open_uploads = 0;
};

struct ScenarioReport {
  Uuid workflow_id;
  std::vector<CrashRecord> crashes;
  /// Keys with copy activity (a new upload or a completed copy) after the first crash.
  std::set<std::string> re_executed;
  std::optional<transfer::TransferStatusSnapshot> final_snapshot;
  /// Completed copies per source key over the whole run.
  std::map<std::string, std::uint64_t> completed_copies;
  std::vector<std::string> content_mismatches;
  std::size_t open_uploads_after = 0;
  double duration = 0.0;
  std::filesystem::path db_path;
  std::filesystem::path sim_dir;
};

void to_json(nlohmann::json& j, const ScenarioReport& r);

/// Throws std::runtime_error on timeout or when the service misbehaves.
ScenarioReport run_crash_scenario(const ScenarioOptions& options);

}  // namespace s3mirror::harness
