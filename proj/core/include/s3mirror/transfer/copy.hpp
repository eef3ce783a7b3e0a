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

#include <exception>
#include <functional>
#include <span>
#include <string>

#include "s3mirror/store/object_store.hpp"
#include "s3mirror/transfer/throttle.hpp"
#include "s3mirror/transfer/types.hpp"

namespace s3mirror::transfer {

enum class ErrorClass { Retryable, Permanent };

/// Store errors follow their kind; anything unrecognised is retryable.
ErrorClass classify_error(const std::exception_ptr& error);
ErrorClass classify_error(const std::exception& error);

enum class VerifyMode { None, Size };

struct CopyOptions {
  std::uint64_t part_size = 16 * store::kMiB;
  int file_parallelism = 8;
  VerifyMode verify = VerifyMode::None;
  /// Polled between parts; when it returns true the copy stops with
  /// durable::Cancelled and the upload is left open.
  std::function<bool()> should_stop;
};

/// Copies one object with up to `file_parallelism` concurrent part copies,
/// each holding a throttle permit for its duration. Zero-byte objects use a
/// single direct copy. On failure the multipart upload is left OPEN and the
/// error propagates.
FileTask s3_transfer_file(store::ObjectStore& store, const store::ObjectRef& source,
                          const store::ObjectRef& dest, const CopyOptions& options,
                          Throttle& throttle);

/// Aborts every OPEN multipart upload in `bucket`; returns how many.
std::size_t cleanup_leaks(store::ObjectStore& store, const std::string& bucket);

/// Counts, byte totals and rate for a task list. Times are Unix seconds.
/// Once complete, elapsed stops at the last finish time.
TransferStatusSnapshot aggregate_status(std::span<const FileTask> tasks, double started_at,
                                        double now);

}  // namespace s3mirror::transfer
