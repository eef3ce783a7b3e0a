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
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "s3mirror/common/uuid.hpp"
#include "s3mirror/store/types.hpp"

namespace s3mirror::transfer {

class InvalidRequest : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PartSizeBounds {
  std::uint64_t min = 8 * store::kMiB;
  std::uint64_t max = 128 * store::kMiB;
};

struct TransferRequest {
  std::string source_bucket;
  std::string dest_bucket;
  std::vector<std::string> keys;
  std::string dest_prefix;
  std::uint64_t part_size = 16 * store::kMiB;
  int file_parallelism = 8;

  /// Throws InvalidRequest: empty buckets, empty or duplicated keys, keys
  /// with a leading '/', part_size outside `bounds`, parallelism < 1.
  void validate(const PartSizeBounds& bounds) const;
  std::string dest_key(const std::string& key) const { return dest_prefix + key; }
};

void to_json(nlohmann::json& j, const TransferRequest& r);
/// Missing part_size / file_parallelism keep the struct's current values, so
/// callers can pre-fill configured defaults.
void from_json(const nlohmann::json& j, TransferRequest& r);

enum class FileStatus { Pending, InProgress, Success, Failed };
std::string_view to_string(FileStatus s);
FileStatus file_status_from(std::string_view s);
inline bool is_terminal(FileStatus s) { return s == FileStatus::Success || s == FileStatus::Failed; }

struct FileTask {
  std::string key;
  std::optional<std::uint64_t> size;
  FileStatus status = FileStatus::Pending;
  /// Unix seconds, millisecond resolution.
  std::optional<double> started_at;
  std::optional<double> finished_at;
  std::optional<double> duration;
  int attempts = 0;
  std::optional<std::string> error;
};

void to_json(nlohmann::json& j, const FileTask& t);
void from_json(const nlohmann::json& j, FileTask& t);

struct StatusCounts {
  std::size_t pending = 0;
  std::size_t in_progress = 0;
  std::size_t success = 0;
  std::size_t failed = 0;
  friend bool operator==(const StatusCounts&, const StatusCounts&) = default;
};

struct TransferStatusSnapshot {
  Uuid workflow_id;
  std::vector<FileTask> tasks;
  StatusCounts counts;
  std::uint64_t bytes_total = 0;
  std::uint64_t bytes_done = 0;
  double elapsed = 0.0;
  /// bytes per second
  double overall_rate = 0.0;
  bool complete = false;
};

void to_json(nlohmann::json& j, const TransferStatusSnapshot& s);
void from_json(const nlohmann::json& j, TransferStatusSnapshot& s);

/// Static partitioning of the bucket-prefix request budget across workers.
struct ThrottleConfig {
  int global_max_inflight = 3500;
  int per_worker_share = 3500;

  static ThrottleConfig partitioned(int global_max_inflight, int max_workers);
  /// Throws std::invalid_argument unless per_worker_share * workers <= global_max_inflight.
  void validate(int workers = 1) const;
};

}  // namespace s3mirror::transfer
