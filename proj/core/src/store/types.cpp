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

#include "s3mirror/store/types.hpp"

namespace s3mirror::store {

void ObjectRef::validate() const {
  if (bucket.empty()) throw StoreError(ErrorKind::InvalidArgument, "empty bucket name");
  if (key.empty()) throw StoreError(ErrorKind::InvalidArgument, "empty object key");
  if (key.front() == '/')
    throw StoreError(ErrorKind::InvalidArgument, "object key must not start with '/': " + key);
}

std::string_view to_string(UploadState s) {
  switch (s) {
    case UploadState::Open: return "OPEN";
    case UploadState::Completed: return "COMPLETED";
    case UploadState::Aborted: return "ABORTED";
  }
  return "OPEN";
}

std::vector<PartSpec> compute_parts(std::uint64_t size, std::uint64_t part_size) {
  if (part_size == 0) throw std::invalid_argument("part_size must be positive");
  std::vector<PartSpec> parts;
  parts.reserve(static_cast<std::size_t>((size + part_size - 1) / part_size));
  int number = 1;
  for (std::uint64_t start = 0; start < size; start += part_size) {
    const std::uint64_t len = std::min(part_size, size - start);
    parts.push_back(PartSpec{number++, start, start + len - 1});
  }
  return parts;
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::NoSuchBucket: return "NoSuchBucket";
    case ErrorKind::NoSuchUpload: return "NoSuchUpload";
    case ErrorKind::PermissionDenied: return "PermissionDenied";
    case ErrorKind::RangeInvalid: return "RangeInvalid";
    case ErrorKind::MissingPart: return "MissingPart";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Intermittent: return "IntermittentError";
    case ErrorKind::Throttled: return "Throttled";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::Transport: return "TransportError";
  }
  return "Unknown";
}

bool is_retryable(ErrorKind k) {
  switch (k) {
    case ErrorKind::Intermittent:
    case ErrorKind::Throttled:
    case ErrorKind::Timeout:
    case ErrorKind::Transport:
      return true;
    default:
      return false;
  }
}

}  // namespace s3mirror::store
