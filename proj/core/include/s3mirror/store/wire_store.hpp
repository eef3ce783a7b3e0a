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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "s3mirror/store/object_store.hpp"
#include "s3mirror/store/sigv4.hpp"

namespace s3mirror::store {

struct WireStoreOptions {
  /// "http://host:port" or "https://host". Path-style addressing is used.
  std::string endpoint;
  sigv4::Credentials credentials;
  int connect_timeout_s = 10;
  int read_timeout_s = 300;

  /// Reads MIRROR_S3_ENDPOINT, MIRROR_S3_KEY, MIRROR_S3_SECRET and
  /// MIRROR_S3_REGION. Throws std::invalid_argument if the endpoint is unset.
  static WireStoreOptions from_env();
};

/// S3 REST backend covering the multipart-copy subset.
class WireStore final : public ObjectStore {
 public:
  explicit WireStore(WireStoreOptions options);
  ~WireStore() override;

  void create_bucket(const std::string& bucket) override;
  ObjectMeta head_object(const ObjectRef& ref) override;
  void put_object(const ObjectRef& ref, std::string_view data) override;
  std::string copy_object(const ObjectRef& source, const ObjectRef& dest) override;
  MultipartUpload create_multipart(const ObjectRef& target) override;
  std::string upload_part_copy(const MultipartUpload& upload, const ObjectRef& source,
                               const PartSpec& part) override;
  std::string complete_multipart(MultipartUpload& upload,
                                 std::span<const std::string> etags) override;
  void abort_multipart(MultipartUpload& upload) override;
  std::vector<MultipartUpload> list_incomplete_uploads(const std::string& bucket) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

namespace xml {
/// Text of the first <tag>...</tag> at or after `from`, entity-decoded.
std::optional<std::string> first(std::string_view doc, std::string_view tag);
/// Raw inner text of every <tag>...</tag> element, in order.
std::vector<std::string_view> all(std::string_view doc, std::string_view tag);
std::string escape(std::string_view text);
std::string unescape(std::string_view text);
}  // namespace xml

/// Maps an S3 error code and HTTP status to the store error taxonomy.
ErrorKind kind_for_s3_error(std::string_view code, int http_status);

}  // namespace s3mirror::store
