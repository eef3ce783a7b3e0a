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

#include "s3mirror/transfer/types.hpp"

#include <cmath>
#include <set>

namespace s3mirror::transfer {

using nlohmann::json;

void TransferRequest::validate(const PartSizeBounds& bounds) const {
  if (source_bucket.empty()) throw InvalidRequest("source_bucket must not be empty");
  if (dest_bucket.empty()) throw InvalidRequest("dest_bucket must not be empty");
  if (keys.empty()) throw InvalidRequest("keys must not be empty");
  std::set<std::string_view> seen;
  for (const auto& k : keys) {
    if (k.empty()) throw InvalidRequest("keys must not contain empty strings");
    if (k.front() == '/') throw InvalidRequest("key must not start with '/': " + k);
    if (!seen.insert(k).second) throw InvalidRequest("duplicate key: " + k);
  }
  if (!dest_prefix.empty() && dest_prefix.front() == '/')
    throw InvalidRequest("dest_prefix must not start with '/'");
  if (part_size < bounds.min || part_size > bounds.max)
    throw InvalidRequest("part_size " + std::to_string(part_size) + " outside [" +
                         std::to_string(bounds.min) + ", " + std::to_string(bounds.max) + "]");
  if (file_parallelism < 1) throw InvalidRequest("file_parallelism must be positive");
}

void to_json(json& j, const TransferRequest& r) {
  j = json{{"source_bucket", r.source_bucket}, {"dest_bucket", r.dest_bucket},
           {"keys", r.keys},                   {"dest_prefix", r.dest_prefix},
           {"part_size", r.part_size},         {"file_parallelism", r.file_parallelism}};
}

void from_json(const json& j, TransferRequest& r) {
  if (!j.is_object()) throw InvalidRequest("request body must be a JSON object");
  try {
    r.source_bucket = j.at("source_bucket").get<std::string>();
    r.dest_bucket = j.at("dest_bucket").get<std::string>();
    r.keys = j.at("keys").get<std::vector<std::string>>();
    r.dest_prefix = j.value("dest_prefix", std::string{});
    if (j.contains("part_size")) r.part_size = j.at("part_size").get<std::uint64_t>();
    if (j.contains("file_parallelism")) r.file_parallelism = j.at("file_parallelism").get<int>();
  } catch (const json::exception& e) {
    throw InvalidRequest(std::string("malformed transfer request: ") + e.what());
  }
}

std::string_view to_string(FileStatus s) {
  switch (s) {
    case FileStatus::Pending: return "PENDING";
    case FileStatus::InProgress: return "IN_PROGRESS";
    case FileStatus::Success: return "SUCCESS";
    case FileStatus::Failed: return "FAILED";
  }
  return "PENDING";
}

FileStatus file_status_from(std::string_view s) {
  if (s == "IN_PROGRESS") return FileStatus::InProgress;
  if (s == "SUCCESS") return FileStatus::Success;
  if (s == "FAILED") return FileStatus::Failed;
  return FileStatus::Pending;
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_get(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

void to_json(json& j, const FileTask& t) {
  j = json{{"key", t.key},
           {"size", opt(t.size)},
           {"status", to_string(t.status)},
           {"started_at", opt(t.started_at)},
           {"finished_at", opt(t.finished_at)},
           {"duration", opt(t.duration)},
           {"attempts", t.attempts},
           {"error", opt(t.error)}};
}

void from_json(const json& j, FileTask& t) {
  t.key = j.at("key").get<std::string>();
  t.size = opt_get<std::uint64_t>(j, "size");
  t.status = file_status_from(j.at("status").get<std::string>());
  t.started_at = opt_get<double>(j, "started_at");
  t.finished_at = opt_get<double>(j, "finished_at");
  t.duration = opt_get<double>(j, "duration");
  t.attempts = j.value("attempts", 0);
  t.error = opt_get<std::string>(j, "error");
}

void to_json(json& j, const TransferStatusSnapshot& s) {
  j = json{{"workflow_id", s.workflow_id.str()},
           {"tasks", s.tasks},
           {"counts",
            {{"pending", s.counts.pending},
             {"in_progress", s.counts.in_progress},
             {"success", s.counts.success},
             {"failed", s.counts.failed}}},
           {"bytes_total", s.bytes_total},
           {"bytes_done", s.bytes_done},
           {"elapsed", s.elapsed},
           {"overall_rate", s.overall_rate},
           {"complete", s.complete}};
}

void from_json(const json& j, TransferStatusSnapshot& s) {
  auto id = Uuid::parse(j.at("workflow_id").get<std::string>());
  if (!id) throw std::invalid_argument("snapshot has a malformed workflow_id");
  s.workflow_id = *id;
  s.tasks = j.at("tasks").get<std::vector<FileTask>>();
  const auto& c = j.at("counts");
  s.counts = StatusCounts{c.at("pending").get<std::size_t>(), c.at("in_progress").get<std::size_t>(),
                          c.at("success").get<std::size_t>(), c.at("failed").get<std::size_t>()};
  s.bytes_total = j.at("bytes_total").get<std::uint64_t>();
  s.bytes_done = j.at("bytes_done").get<std::uint64_t>();
  s.elapsed = j.at("elapsed").get<double>();
  s.overall_rate = j.at("overall_rate").get<double>();
  s.complete = j.at("complete").get<bool>();
}

ThrottleConfig ThrottleConfig::partitioned(int global_max_inflight, int max_workers) {
  if (global_max_inflight <= 0 || max_workers <= 0)
    throw std::invalid_argument("throttle sizes must be positive");
  if (global_max_inflight < max_workers)
    throw std::invalid_argument("global ceiling " + std::to_string(global_max_inflight) + " cannot give " +
                                std::to_string(max_workers) + " workers a permit each");
  return ThrottleConfig{global_max_inflight, global_max_inflight / max_workers};
}

void ThrottleConfig::validate(int workers) const {
  if (global_max_inflight <= 0 || per_worker_share <= 0)
    throw std::invalid_argument("throttle sizes must be positive");
  if (static_cast<long long>(per_worker_share) * workers > global_max_inflight)
    throw std::invalid_argument("per_worker_share x workers exceeds global_max_inflight");
}

}  // namespace s3mirror::transfer
