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

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "s3mirror/store/fault_plan.hpp"
#include "s3mirror/store/object_store.hpp"

namespace s3mirror::store {

struct SimulatedStoreOptions {
  FaultPlan faults;
  /// When set, metadata (and literal object bytes) live in this directory and
  /// are shared by every process that opens it. In-flight counters stay
  /// per-process.
  std::optional<std::filesystem::path> persist_dir;
};

/// In-process object store. Objects are sequences of extents over immutable
/// blobs, so a part copy slices metadata instead of moving bytes, the way a
/// real back plane copy never passes data through the client. Blobs are
/// either literal bytes or seeded generated content.
class SimulatedStore final : public ObjectStore {
 public:
  explicit SimulatedStore(SimulatedStoreOptions options = {});
  ~SimulatedStore() override;

  void create_bucket(const std::string& bucket) override;
  ObjectMeta head_object(const ObjectRef& ref) override;
  void put_object(const ObjectRef& ref, std::string_view data) override;
  void put_generated(const ObjectRef& ref, std::uint64_t size, std::uint64_t seed) override;
  std::string copy_object(const ObjectRef& source, const ObjectRef& dest) override;
  MultipartUpload create_multipart(const ObjectRef& target) override;
  std::string upload_part_copy(const MultipartUpload& upload, const ObjectRef& source,
                               const PartSpec& part) override;
  std::string complete_multipart(MultipartUpload& upload,
                                 std::span<const std::string> etags) override;
  void abort_multipart(MultipartUpload& upload) override;
  std::vector<MultipartUpload> list_incomplete_uploads(const std::string& bucket) override;

  // Test and harness surface; none of these are subject to faults or latency.

  StoreMetrics instrument() const;
  void reset_max_inflight();
  StorageAccounting accounting() const;
  std::vector<std::string> list_objects(const std::string& bucket) const;
  bool exists(const ObjectRef& ref) const;
  std::string read_object(const ObjectRef& ref) const;
  /// SHA-256 over the object's bytes.
  std::string content_hash(const ObjectRef& ref) const;
  void set_readable(const ObjectRef& ref, bool readable);
  void set_fault_plan(FaultPlan plan);
  FaultPlan fault_plan() const;

  struct State;

 private:
  enum class Op { Head, PartCopy, DirectCopy, Create, Complete, Abort, List, Put };

  class InflightGuard;
  void simulate_request(Op op, const std::string& identity);
  void check_source_faults(Op op, const std::string& key, const std::string& identity);

  template <typename F>
  auto with_state(bool mutate, F&& f) const;

  void load_state() const;
  void save_state() const;

  SimulatedStoreOptions options_;
  mutable std::mutex mu_;
  std::unique_ptr<State> state_;

  mutable std::mutex fault_mu_;
  std::map<std::string, std::uint64_t> occurrences_;
  std::map<std::string, int> forced_remaining_;

  std::atomic<std::int64_t> inflight_{0};
  std::atomic<std::int64_t> max_inflight_{0};
  std::atomic<std::uint64_t> requests_{0};

  mutable std::uint64_t loaded_ino_ = 0;
  mutable std::int64_t loaded_mtime_ns_ = -1;
  mutable std::uint64_t loaded_size_ = 0;
};

}  // namespace s3mirror::store
