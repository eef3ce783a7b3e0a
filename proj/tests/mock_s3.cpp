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

#include "mock_s3.hpp"

#include <httplib.h>

#include <thread>

#include "s3mirror/common/digest.hpp"
#include "s3mirror/store/wire_store.hpp"

namespace s3mirror::testing {

namespace {

using store::ErrorKind;
using store::StoreError;

std::pair<int, std::string> s3_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotFound: return {404, "NoSuchKey"};
    case ErrorKind::NoSuchBucket: return {404, "NoSuchBucket"};
    case ErrorKind::NoSuchUpload: return {404, "NoSuchUpload"};
    case ErrorKind::PermissionDenied: return {403, "AccessDenied"};
    case ErrorKind::RangeInvalid: return {416, "InvalidRange"};
    case ErrorKind::MissingPart: return {400, "InvalidPart"};
    case ErrorKind::InvalidArgument: return {400, "InvalidArgument"};
    case ErrorKind::Throttled: return {503, "SlowDown"};
    case ErrorKind::Timeout: return {400, "RequestTimeout"};
    default: return {500, "InternalError"};
  }
}

void error_reply(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  res.status = status;
  res.set_content("<?xml version=\"1.0\" encoding=\"UTF-8\"?><Error><Code>" + code + "</Code><Message>" +
                      store::xml::escape(message) + "</Message></Error>",
                  "application/xml");
}

// Splits "/bucket/key/with/slashes" (already decoded).
std::pair<std::string, std::string> split_path(const std::string& path) {
  const std::string p = path.substr(1);
  const auto slash = p.find('/');
  if (slash == std::string::npos) return {p, ""};
  return {p.substr(0, slash), p.substr(slash + 1)};
}

store::ObjectRef parse_copy_source(const std::string& header) {
  std::string decoded = httplib::detail::decode_url(header, false);
  if (!decoded.empty() && decoded[0] == '/') decoded.erase(0, 1);
  const auto slash = decoded.find('/');
  return {decoded.substr(0, slash), decoded.substr(slash + 1)};
}

}  // namespace

struct MockS3Server::Impl {
  store::SimulatedStore& sim;
  store::sigv4::Credentials creds;
  std::atomic<int>& rejected;
  httplib::Server http;
  std::thread thread;
  int port = -1;

  Impl(store::SimulatedStore& s, store::sigv4::Credentials c, std::atomic<int>& r)
      : sim(s), creds(std::move(c)), rejected(r) {}

  bool verify(const httplib::Request& req) {
    const auto auth = req.get_header_value("Authorization");
    const auto date = req.get_header_value("x-amz-date");
    const auto signed_pos = auth.find("SignedHeaders=");
    if (auth.empty() || date.empty() || signed_pos == std::string::npos) return false;
    const auto end = auth.find(',', signed_pos);
    const std::string names = auth.substr(signed_pos + 14, end - signed_pos - 14);
    store::sigv4::Request sr;
    sr.method = req.method;
    const auto q = req.target.find('?');
    sr.path = req.target.substr(0, q);
    for (const auto& [k, v] : req.params) sr.query.emplace_back(k, v);
    std::size_t start = 0;
    while (start <= names.size()) {
      auto semi = names.find(';', start);
      const std::string name = names.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
      sr.headers[name] = req.get_header_value(name);
      // httplib hands header values over URL-decoded; restore what was signed.
      if (name == "x-amz-copy-source") sr.headers[name] = store::sigv4::uri_encode(sr.headers[name], true);
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    sr.payload_hash = req.get_header_value("x-amz-content-sha256");
    if (sr.payload_hash != sha256_hex(req.body)) return false;
    return store::sigv4::authorization(sr, creds, date) == auth;
  }

  void handle(const httplib::Request& req, httplib::Response& res) {
    if (!verify(req)) {
      ++rejected;
      return error_reply(res, 403, "SignatureDoesNotMatch", "signature mismatch");
    }
    const auto [bucket, key] = split_path(req.path);
    try {
      route(req, res, bucket, key);
    } catch (const StoreError& e) {
      auto [status, code] = s3_code(e.kind());
      error_reply(res, status, code, e.what());
    }
  }

  void route(const httplib::Request& req, httplib::Response& res, const std::string& bucket,
             const std::string& key) {
    const std::string copy_source = req.get_header_value("x-amz-copy-source");
    if (req.method == "PUT" && key.empty()) {
      sim.create_bucket(bucket);
      return;
    }
    if (req.method == "HEAD") {
      auto meta = sim.head_object({bucket, key});
      res.set_header("Content-Length", std::to_string(meta.size));
      res.set_header("ETag", "\"" + meta.etag + "\"");
      return;
    }
    if (req.method == "GET" && key.empty() && req.has_param("uploads")) {
      std::string body = "<ListMultipartUploadsResult><Bucket>" + bucket + "</Bucket><IsTruncated>false</IsTruncated>";
      for (const auto& up : sim.list_incomplete_uploads(bucket))
        body += "<Upload><Key>" + store::xml::escape(up.target.key) + "</Key><UploadId>" + up.upload_id +
                "</UploadId></Upload>";
      body += "</ListMultipartUploadsResult>";
      res.set_content(body, "application/xml");
      return;
    }
    store::MultipartUpload up;
    up.target = {bucket, key};
    up.upload_id = req.get_param_value("uploadId");
    if (req.method == "POST" && req.has_param("uploads")) {
      auto created = sim.create_multipart({bucket, key});
      res.set_content("<InitiateMultipartUploadResult><Bucket>" + bucket + "</Bucket><Key>" +
                          store::xml::escape(key) + "</Key><UploadId>" + created.upload_id +
                          "</UploadId></InitiateMultipartUploadResult>",
                      "application/xml");
      return;
    }
    if (req.method == "PUT" && req.has_param("partNumber")) {
      const std::string range = req.get_header_value("x-amz-copy-source-range");
      const auto dash = range.find('-');
      store::PartSpec part{std::stoi(req.get_param_value("partNumber")), std::stoull(range.substr(6, dash - 6)),
                           std::stoull(range.substr(dash + 1))};
      const auto etag = sim.upload_part_copy(up, parse_copy_source(copy_source), part);
      res.set_content("<CopyPartResult><ETag>\"" + etag + "\"</ETag></CopyPartResult>", "application/xml");
      return;
    }
    if (req.method == "POST" && req.has_param("uploadId")) {
      std::vector<std::string> etags;
      for (auto part : store::xml::all(req.body, "Part")) {
        auto etag = store::xml::first(part, "ETag").value_or("");
        if (etag.size() >= 2 && etag.front() == '"') etag = etag.substr(1, etag.size() - 2);
        etags.push_back(etag);
      }
      const auto etag = sim.complete_multipart(up, etags);
      res.set_content("<CompleteMultipartUploadResult><ETag>\"" + etag + "\"</ETag></CompleteMultipartUploadResult>",
                      "application/xml");
      return;
    }
    if (req.method == "DELETE" && req.has_param("uploadId")) {
      sim.abort_multipart(up);
      res.status = 204;
      return;
    }
    if (req.method == "PUT" && !copy_source.empty()) {
      const auto etag = sim.copy_object(parse_copy_source(copy_source), {bucket, key});
      res.set_content("<CopyObjectResult><ETag>\"" + etag + "\"</ETag></CopyObjectResult>", "application/xml");
      return;
    }
    if (req.method == "PUT") {
      sim.put_object({bucket, key}, req.body);
      return;
    }
    error_reply(res, 400, "InvalidRequest", "unsupported request");
  }
};

MockS3Server::MockS3Server(store::SimulatedStore& backend, store::sigv4::Credentials credentials)
    : impl_(std::make_unique<Impl>(backend, std::move(credentials), rejected_)) {
  auto h = [this](const httplib::Request& req, httplib::Response& res) { impl_->handle(req, res); };
  impl_->http.Get("/.*", h);
  impl_->http.Put("/.*", h);
  impl_->http.Post("/.*", h);
  impl_->http.Delete("/.*", h);
  // Short keep-alive so stop() does not wait on idle client connections.
  impl_->http.set_keep_alive_timeout(1);
  impl_->port = impl_->http.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

MockS3Server::~MockS3Server() {
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockS3Server::endpoint() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }
int MockS3Server::port() const { return impl_->port; }

}  // namespace s3mirror::testing
