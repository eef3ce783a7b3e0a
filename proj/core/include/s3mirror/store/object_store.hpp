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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s3mirror/store/types.hpp"

namespace s3mirror::store {

/// Bucket/object API restricted to what server-side mirroring needs.
/// Implementations must accept concurrent calls.
class ObjectStore {
 public:
  virtual ~ObjectStore() = default;

  virtual void create_bucket(const std::string& bucket) = 0;
  virtual ObjectMeta head_object(const ObjectRef& ref) = 0;
  virtual void put_object(const ObjectRef& ref, std::string_view data) = 0;
  /// Stores `size` bytes of deterministic pseudo-random content for `seed`.
  virtual void put_generated(const ObjectRef& ref, std::uint64_t size, std::uint64_t seed);

  /// Whole-object server-side copy, used for zero-byte objects.
  virtual std::string copy_object(const ObjectRef& source, const ObjectRef& dest) = 0;

  virtual MultipartUpload create_multipart(const ObjectRef& target) = 0;
  /// Server-side copy of source[part.start..part.end] into the upload. Re-sending a
  /// part overwrites it.
  virtual std::string upload_part_copy(const MultipartUpload& upload, const ObjectRef& source,
                                       const PartSpec& part) = 0;
  /// `etags[i]` is the etag of part i+1.
  virtual std::string complete_multipart(MultipartUpload& upload,
                                         std::span<const std::string> etags) = 0;
  virtual void abort_multipart(MultipartUpload& upload) = 0;
  virtual std::vector<MultipartUpload> list_incomplete_uploads(const std::string& bucket) = 0;
};

}  // namespace s3mirror::store
