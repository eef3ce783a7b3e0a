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

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace s3mirror::store::sigv4 {

struct Credentials {
  std::string access_key;
  std::string secret_key;
  std::string region = "us-east-1";
  std::string service = "s3";
};

struct Request {
  std::string method;
  /// Already percent-encoded path, e.g. "/bucket/some%20key".
  std::string path;
  std::vector<std::pair<std::string, std::string>> query;  // raw, unencoded
  /// Header names in any case. Must include "host".
  std::map<std::string, std::string> headers;
  /// Hex SHA-256 of the body, or "UNSIGNED-PAYLOAD".
  std::string payload_hash;
};

/// RFC 3986 encoding as S3 expects; '/' is kept when `keep_slash`.
std::string uri_encode(std::string_view text, bool keep_slash);
std::string canonical_query(const std::vector<std::pair<std::string, std::string>>& query);
std::string canonical_request(const Request& request, std::string* signed_headers = nullptr);
std::string string_to_sign(const std::string& amz_date, const std::string& scope,
                           const std::string& canonical);
/// Value of the Authorization header. `amz_date` is "YYYYMMDDTHHMMSSZ" and must
/// match the request's x-amz-date header.
std::string authorization(const Request& request, const Credentials& creds,
                          const std::string& amz_date);
/// Current UTC time in x-amz-date form.
std::string amz_date_now();

}  // namespace s3mirror::store::sigv4
