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

#include "s3mirror/transfer/copy.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "s3mirror/common/clock.hpp"
#include "s3mirror/durable/types.hpp"

namespace s3mirror::transfer {

ErrorClass classify_error(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return classify_error(e);
  } catch (...) {
    return ErrorClass::Retryable;
  }
}

ErrorClass classify_error(const std::exception& error) {
  if (const auto* se = dynamic_cast<const store::StoreError*>(&error))
    return store::is_retryable(se->kind()) ? ErrorClass::Retryable : ErrorClass::Permanent;
  return ErrorClass::Retryable;
}

namespace {

double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

}  // namespace

FileTask s3_transfer_file(store::ObjectStore& store, const store::ObjectRef& source,
                          const store::ObjectRef& dest, const CopyOptions& options,
                          Throttle& throttle) {
  if (options.part_size == 0) throw std::invalid_argument("part_size must be positive");
  if (options.file_parallelism < 1) throw std::invalid_argument("file_parallelism must be positive");
  const auto stopping = [&] { return options.should_stop && options.should_stop(); };

  FileTask task;
  task.key = source.key;
  task.status = FileStatus::InProgress;
  const std::int64_t started = now_ms();
  task.started_at = ms_to_seconds(started);

  const store::ObjectMeta meta = store.head_object(source);
  task.size = meta.size;

  if (meta.size == 0) {
    auto permit = throttle.acquire();
    store.copy_object(source, dest);
  } else {
    const auto parts = store::compute_parts(meta.size, options.part_size);
    store::MultipartUpload upload = store.create_multipart(dest);
    std::vector<std::string> etags(parts.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto record_error = [&](std::exception_ptr ep) {
      std::lock_guard lk(error_mu);
      if (!first_error) first_error = ep;
      failed = true;
    };
    auto copy_parts = [&] {
      while (!failed) {
        const std::size_t i = next++;
        if (i >= parts.size()) return;
        if (stopping()) {
          record_error(std::make_exception_ptr(durable::Cancelled()));
          return;
        }
        try {
          auto permit = throttle.acquire();
          etags[i] = store.upload_part_copy(upload, source, parts[i]);
        } catch (...) {
          record_error(std::current_exception());
        }
      }
    };

    const std::size_t lanes =
        std::min<std::size_t>(static_cast<std::size_t>(options.file_parallelism), parts.size());
    std::vector<std::thread> helpers;
    helpers.reserve(lanes - 1);
    for (std::size_t i = 1; i < lanes; ++i) helpers.emplace_back(copy_parts);
    copy_parts();
    for (auto& t : helpers) t.join();
    if (first_error) std::rethrow_exception(first_error);

    store.complete_multipart(upload, etags);
  }

  if (options.verify == VerifyMode::Size) {
    const auto copied = store.head_object(dest);
    if (copied.size != meta.size)
      throw store::StoreError(store::ErrorKind::InvalidArgument,
                              "size mismatch after copy of " + source.str() + ": " +
                                  std::to_string(copied.size) + " != " + std::to_string(meta.size));
  }

  const std::int64_t finished = now_ms();
  task.finished_at = ms_to_seconds(finished);
  task.duration = round_ms(ms_to_seconds(finished - started));
  task.status = FileStatus::Success;
  return task;
}

std::size_t cleanup_leaks(store::ObjectStore& store, const std::string& bucket) {
  std::size_t aborted = 0;
  for (auto& upload : store.list_incomplete_uploads(bucket)) {
    store.abort_multipart(upload);
    ++aborted;
  }
  return aborted;
}

TransferStatusSnapshot aggregate_status(std::span<const FileTask> tasks, double started_at,
                                        double now) {
  TransferStatusSnapshot snap;
  snap.tasks.assign(tasks.begin(), tasks.end());
  std::optional<double> last_finish;
  for (const auto& t : tasks) {
    switch (t.status) {
      case FileStatus::Pending: ++snap.counts.pending; break;
      case FileStatus::InProgress: ++snap.counts.in_progress; break;
      case FileStatus::Success: ++snap.counts.success; break;
      case FileStatus::Failed: ++snap.counts.failed; break;
    }
    if (t.size) snap.bytes_total += *t.size;
    if (t.status == FileStatus::Success && t.size) snap.bytes_done += *t.size;
    if (t.finished_at) last_finish = std::max(last_finish.value_or(*t.finished_at), *t.finished_at);
  }
  snap.complete = snap.counts.pending == 0 && snap.counts.in_progress == 0;
  const double end = (snap.complete && last_finish) ? *last_finish : now;
  snap.elapsed = std::max(0.0, end - started_at);
  snap.overall_rate = snap.elapsed > 0.0 ? static_cast<double>(snap.bytes_done) / snap.elapsed : 0.0;
  return snap;
}

}  // namespace s3mirror::transfer
