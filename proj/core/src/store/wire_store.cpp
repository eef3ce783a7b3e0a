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

#include "s3mirror/store/wire_store.hpp"

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <mutex>

#include "s3mirror/common/digest.hpp"

namespace s3mirror::store {

namespace xml {

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view text) {
  static constexpr std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    bool matched = false;
    if (text[i] == '&') {
      for (const auto& [entity, ch] : kEntities) {
        if (text.substr(i, entity.size()) == entity) {
          out += ch;
          i += entity.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += text[i++];
  }
  return out;
}

std::vector<std::string_view> all(std::string_view doc, std::string_view tag) {
  std::vector<std::string_view> out;
  const std::string open = "<" + std::string(tag);
  const std::string close = "</" + std::string(tag) + ">";
  std::size_t pos = 0;
  while ((pos = doc.find(open, pos)) != std::string_view::npos) {
    const std::size_t after = pos + open.size();
    // Skip longer tag names sharing the prefix, e.g. <Upload> vs <UploadId>.
    if (after >= doc.size() || (doc[after] != '>' && doc[after] != ' ')) {
      pos = after;
      continue;
    }
    const std::size_t gt = doc.find('>', after);
    if (gt == std::string_view::npos) break;
    if (doc[gt - 1] == '/') {
      out.emplace_back();
      pos = gt + 1;
      continue;
    }
    const std::size_t end = doc.find(close, gt + 1);
    if (end == std::string_view::npos) break;
    out.push_back(doc.substr(gt + 1, end - gt - 1));
    pos = end + close.size();
  }
  return out;
}

std::optional<std::string> first(std::string_view doc, std::string_view tag) {
  auto found = all(doc, tag);
  if (found.empty()) return std::nullopt;
  return unescape(found.front());
}

}  // namespace xml

ErrorKind kind_for_s3_error(std::string_view code, int http_status) {
  if (code == "NoSuchKey") return ErrorKind::NotFound;
  if (code == "NoSuchBucket") return ErrorKind::NoSuchBucket;
  if (code == "NoSuchUpload") return ErrorKind::NoSuchUpload;
  if (code == "AccessDenied" || code == "AllAccessDisabled" || code == "InvalidAccessKeyId" ||
      code == "SignatureDoesNotMatch")
    return ErrorKind::PermissionDenied;
  if (code == "InvalidRange") return ErrorKind::RangeInvalid;
  if (code == "InvalidPart" || code == "InvalidPartOrder") return ErrorKind::MissingPart;
  if (code == "SlowDown" || code == "Throttling" || code == "TooManyRequests")
    return ErrorKind::Throttled;
  if (code == "RequestTimeout") return ErrorKind::Timeout;
  if (code == "InternalError" || code == "ServiceUnavailable") return ErrorKind::Intermittent;
  if (http_status == 404) return ErrorKind::NotFound;
  if (http_status == 403) return ErrorKind::PermissionDenied;
  if (http_status == 416) return ErrorKind::RangeInvalid;
  if (http_status == 429 || http_status == 503) return ErrorKind::Throttled;
  if (http_status >= 500) return ErrorKind::Intermittent;
  return ErrorKind::InvalidArgument;
}

WireStoreOptions WireStoreOptions::from_env() {
  const auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  WireStoreOptions o;
  o.endpoint = env("MIRROR_S3_ENDPOINT");
  if (o.endpoint.empty()) throw std::invalid_argument("MIRROR_S3_ENDPOINT is not set");
  o.credentials.access_key = env("MIRROR_S3_KEY");
  o.credentials.secret_key = env("MIRROR_S3_SECRET");
  if (auto region = env("MIRROR_S3_REGION"); !region.empty()) o.credentials.region = region;
  return o;
}

namespace {

using Query = std::vector<std::pair<std::string, std::string>>;

std::string object_path(const std::string& bucket, const std::string& key) {
  return "/" + sigv4::uri_encode(bucket, false) + (key.empty() ? "" : "/" + sigv4::uri_encode(key, true));
}

std::string copy_source(const ObjectRef& ref) {
  return "/" + sigv4::uri_encode(ref.bucket, false) + "/" + sigv4::uri_encode(ref.key, true);
}

std::string host_of(const std::string& endpoint) {
  auto start = endpoint.find("://");
  start = start == std::string::npos ? 0 : start + 3;
  auto end = endpoint.find('/', start);
  return endpoint.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

std::string strip_quotes(std::string etag) {
  if (etag.size() >= 2 && etag.front() == '"' && etag.back() == '"')
    etag = etag.substr(1, etag.size() - 2);
  return etag;
}

}  // namespace

struct WireStore::Impl {
  WireStoreOptions options;
  std::string host;

  // Addresses get reused, so cached clients are keyed by a per-instance serial.
  const std::uint64_t serial;

  explicit Impl(WireStoreOptions o)
      : options(std::move(o)), host(host_of(options.endpoint)), serial(next_serial()) {}

  static std::uint64_t next_serial() {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
  }

  // httplib clients are not thread-safe; one per calling thread.
  httplib::Client& client() {
    thread_local std::map<std::uint64_t, std::unique_ptr<httplib::Client>> clients;
    auto& c = clients[serial];
    if (!c) {
      c = std::make_unique<httplib::Client>(options.endpoint);
      c->set_connection_timeout(options.connect_timeout_s);
      c->set_read_timeout(options.read_timeout_s);
      c->set_keep_alive(true);
      c->set_url_encode(false);
    }
    return *c;
  }

  httplib::Result send(const std::string& method, const std::string& path, const Query& query,
                       httplib::Headers extra, const std::string& body = {}) {
    const std::string amz_date = sigv4::amz_date_now();
    sigv4::Request req;
    req.method = method;
    req.path = path;
    req.query = query;
    req.payload_hash = sha256_hex(body);
    req.headers = {{"host", host}, {"x-amz-date", amz_date}, {"x-amz-content-sha256", req.payload_hash}};
    for (const auto& [k, v] : extra) req.headers[k] = v;
    const std::string auth = sigv4::authorization(req, options.credentials, amz_date);

    std::string target = path;
    if (!query.empty()) {
      target += "?";
      bool first = true;
      for (const auto& [k, v] : query) {
        if (!first) target += "&";
        first = false;
        target += sigv4::uri_encode(k, false);
        if (!v.empty()) target += "=" + sigv4::uri_encode(v, false);
      }
    }
    httplib::Headers headers = std::move(extra);
    headers.emplace("x-amz-date", amz_date);
    headers.emplace("x-amz-content-sha256", req.payload_hash);
    headers.emplace("Authorization", auth);

    httplib::Request r;
    r.method = method;
    r.path = target;
    r.headers = std::move(headers);
    r.body = body;
    if (!body.empty() || method == "PUT" || method == "POST")
      r.set_header("Content-Type", "application/octet-stream");
    return client().send(r);
  }

  // Returns the response or throws the mapped StoreError. S3 can report a
  // failure inside a 200 body for copy and complete requests.
  httplib::Response check(httplib::Result result, const std::string& what, bool error_in_body = false) {
    if (!result)
      throw StoreError(ErrorKind::Transport, what + ": " + httplib::to_string(result.error()));
    const httplib::Response& res = *result;
    const bool body_error = error_in_body && res.status == 200 &&
                            res.body.find("<Error>") != std::string::npos;
    if (res.status >= 300 || body_error) {
      const std::string code = xml::first(res.body, "Code").value_or("");
      const std::string message = xml::first(res.body, "Message").value_or(res.reason);
      const int status = body_error ? 500 : res.status;
      throw StoreError(kind_for_s3_error(code, status),
                       what + ": HTTP " + std::to_string(res.status) +
                           (code.empty() ? "" : " " + code) + (message.empty() ? "" : " " + message));
    }
    return res;
  }
};

WireStore::WireStore(WireStoreOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
WireStore::~WireStore() = default;

void WireStore::create_bucket(const std::string& bucket) {
  auto result = impl_->send("PUT", object_path(bucket, ""), {}, {});
  if (result && result->status == 409) return;  // already exists
  impl_->check(std::move(result), "CreateBucket " + bucket);
}

ObjectMeta WireStore::head_object(const ObjectRef& ref) {
  ref.validate();
  auto res = impl_->check(impl_->send("HEAD", object_path(ref.bucket, ref.key), {}, {}),
                          "HeadObject " + ref.str());
  ObjectMeta meta;
  meta.size = res.has_header("Content-Length") ? std::stoull(res.get_header_value("Content-Length")) : 0;
  meta.etag = strip_quotes(res.get_header_value("ETag"));
  return meta;
}

void WireStore::put_object(const ObjectRef& ref, std::string_view data) {
  ref.validate();
  impl_->check(impl_->send("PUT", object_path(ref.bucket, ref.key), {}, {}, std::string(data)),
               "PutObject " + ref.str());
}

std::string WireStore::copy_object(const ObjectRef& source, const ObjectRef& dest) {
  source.validate();
  dest.validate();
  auto res = impl_->check(impl_->send("PUT", object_path(dest.bucket, dest.key), {},
                                      {{"x-amz-copy-source", copy_source(source)}}),
                          "CopyObject " + source.str() + " -> " + dest.str(), true);
  return strip_quotes(xml::first(res.body, "ETag").value_or(""));
}

MultipartUpload WireStore::create_multipart(const ObjectRef& target) {
  target.validate();
  auto res = impl_->check(impl_->send("POST", object_path(target.bucket, target.key), {{"uploads", ""}}, {}),
                          "CreateMultipartUpload " + target.str());
  auto id = xml::first(res.body, "UploadId");
  if (!id) throw StoreError(ErrorKind::Transport, "CreateMultipartUpload: no UploadId in response");
  MultipartUpload up;
  up.upload_id = *id;
  up.target = target;
  return up;
}

std::string WireStore::upload_part_copy(const MultipartUpload& upload, const ObjectRef& source,
                                        const PartSpec& part) {
  const Query query{{"partNumber", std::to_string(part.part_number)}, {"uploadId", upload.upload_id}};
  auto res = impl_->check(
      impl_->send("PUT", object_path(upload.target.bucket, upload.target.key), query,
                  {{"x-amz-copy-source", copy_source(source)},
                   {"x-amz-copy-source-range",
                    "bytes=" + std::to_string(part.start) + "-" + std::to_string(part.end)}}),
      "UploadPartCopy " + source.str() + " part " + std::to_string(part.part_number), true);
  return strip_quotes(xml::first(res.body, "ETag").value_or(""));
}

std::string WireStore::complete_multipart(MultipartUpload& upload, std::span<const std::string> etags) {
  std::string body = "<CompleteMultipartUpload>";
  for (std::size_t i = 0; i < etags.size(); ++i) {
    body += "<Part><PartNumber>" + std::to_string(i + 1) + "</PartNumber><ETag>\"" +
            xml::escape(etags[i]) + "\"</ETag></Part>";
  }
  body += "</CompleteMultipartUpload>";
  auto res = impl_->check(impl_->send("POST", object_path(upload.target.bucket, upload.target.key),
                                      {{"uploadId", upload.upload_id}}, {}, body),
                          "CompleteMultipartUpload " + upload.target.str(), true);
  upload.state = UploadState::Completed;
  for (std::size_t i = 0; i < etags.size(); ++i) upload.completed_parts[static_cast<int>(i + 1)] = etags[i];
  return strip_quotes(xml::first(res.body, "ETag").value_or(""));
}

void WireStore::abort_multipart(MultipartUpload& upload) {
  auto result = impl_->send("DELETE", object_path(upload.target.bucket, upload.target.key),
                            {{"uploadId", upload.upload_id}}, {});
  if (result && result->status == 404) {
    upload.state = UploadState::Aborted;
    return;
  }
  impl_->check(std::move(result), "AbortMultipartUpload " + upload.target.str());
  upload.state = UploadState::Aborted;
}

std::vector<MultipartUpload> WireStore::list_incomplete_uploads(const std::string& bucket) {
  std::vector<MultipartUpload> out;
  std::string key_marker, id_marker;
  for (;;) {
    Query query{{"uploads", ""}};
    if (!key_marker.empty()) query.emplace_back("key-marker", key_marker);
    if (!id_marker.empty()) query.emplace_back("upload-id-marker", id_marker);
    auto res = impl_->check(impl_->send("GET", object_path(bucket, ""), query, {}),
                            "ListMultipartUploads " + bucket);
    for (auto block : xml::all(res.body, "Upload")) {
      MultipartUpload up;
      up.target = ObjectRef{bucket, xml::first(block, "Key").value_or("")};
      up.upload_id = xml::first(block, "UploadId").value_or("");
      out.push_back(std::move(up));
    }
    if (xml::first(res.body, "IsTruncated").value_or("false") != "true") break;
    key_marker = xml::first(res.body, "NextKeyMarker").value_or("");
    id_marker = xml::first(res.body, "NextUploadIdMarker").value_or("");
    if (key_marker.empty() && id_marker.empty()) break;
  }
  return out;
}

}  // namespace s3mirror::store
