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
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace s3mirror::store {

inline constexpr std::uint64_t kMiB = 1024ull * 1024ull;

struct ObjectRef {
  std::string bucket;
  std::string key;

  /// Throws StoreError(InvalidArgument) on an empty bucket or key, or a key
  /// starting with '/'.
  void validate() const;
  std::string str() const { return bucket + "/" + key; }

  friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};

struct ObjectMeta {
  std::uint64_t size = 0;
  std::string etag;
  bool readable = true;
};

/// Inclusive byte range [start, end] copied as part `part_number` (1-based).
struct PartSpec {
  int part_number = 0;
  std::uint64_t start = 0;
  std::uint64_t end = 0;

  std::uint64_t length() const { return end - start + 1; }
  friend bool operator==(const PartSpec&, const PartSpec&) = default;
};

enum class UploadState { Open, Completed, Aborted };
std::string_view to_string(UploadState s);

struct MultipartUpload {
  std::string upload_id;
  ObjectRef target;
  std::map<int, std::string> completed_parts;
  UploadState state = UploadState::Open;
};

/// Splits [0, size) into consecutive ranges of `part_size` bytes, the last
/// one possibly shorter. size 0 yields no parts. Throws std::invalid_argument
/// if part_size is 0.
std::vector<PartSpec> compute_parts(std::uint64_t size, std::uint64_t part_size);

enum class ErrorKind {
  // Permanent.
  NotFound,
  NoSuchBucket,
  NoSuchUpload,
  PermissionDenied,
  RangeInvalid,
  MissingPart,
  InvalidArgument,
  // Retryable.
  Intermittent,
  Throttled,
  Timeout,
  Transport,
};

std::string_view to_string(ErrorKind k);
bool is_retryable(ErrorKind k);

class StoreError : public std::runtime_error {
 public:
  StoreError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct StoreMetrics {
  std::int64_t inflight_writes = 0;
  std::int64_t max_inflight = 0;
  /// Keyed by destination "bucket/key": completed multipart or direct copies.
  std::map<std::string, std::uint64_t> completed_copies;
  /// Keyed by destination "bucket/key": multipart uploads created.
  std::map<std::string, std::uint64_t> uploads_started;
  std::uint64_t bytes_copied = 0;
  std::uint64_t requests = 0;
};

struct StorageAccounting {
  std::uint64_t visible_bytes = 0;
  std::uint64_t open_upload_bytes = 0;
  std::uint64_t total() const { return visible_bytes + open_upload_bytes; }
};

}  // namespace s3mirror::store
