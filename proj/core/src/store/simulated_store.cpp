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

#include "s3mirror/store/simulated_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "s3mirror/common/clock.hpp"
#include "s3mirror/common/digest.hpp"
#include "s3mirror/common/uuid.hpp"
#include "s3mirror/store/content.hpp"

namespace s3mirror::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Extent {
  std::uint64_t blob = 0;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
};

struct Blob {
  bool literal = false;
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
  // Loaded lazily for persisted literal blobs.
  std::shared_ptr<const std::string> data;
};

struct StoredObject {
  std::vector<Extent> extents;
  std::uint64_t size = 0;
  std::string etag;
  bool readable = true;
};

struct StoredPart {
  std::string etag;
  std::vector<Extent> extents;
  std::uint64_t size = 0;
};

struct StoredUpload {
  std::string id;
  ObjectRef target;
  UploadState state = UploadState::Open;
  std::map<int, StoredPart> parts;
  std::int64_t created_at = 0;
  std::uint64_t order = 0;
  std::string final_etag;
  std::vector<std::string> final_etags;
};

std::string tag(std::string_view descriptor) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(descriptor)));
  return buf;
}

std::vector<Extent> slice(const std::vector<Extent>& extents, std::uint64_t start,
                          std::uint64_t length) {
  std::vector<Extent> out;
  std::uint64_t pos = 0;
  const std::uint64_t stop = start + length;
  for (const auto& e : extents) {
    const std::uint64_t e_begin = pos;
    const std::uint64_t e_end = pos + e.length;
    pos = e_end;
    if (e_end <= start) continue;
    if (e_begin >= stop) break;
    const std::uint64_t from = std::max(start, e_begin);
    const std::uint64_t to = std::min(stop, e_end);
    out.push_back(Extent{e.blob, e.offset + (from - e_begin), to - from});
  }
  return out;
}

json extents_to_json(const std::vector<Extent>& extents) {
  json arr = json::array();
  for (const auto& e : extents) arr.push_back({e.blob, e.offset, e.length});
  return arr;
}

std::vector<Extent> extents_from_json(const json& arr) {
  std::vector<Extent> out;
  for (const auto& e : arr)
    out.push_back(Extent{e.at(0).get<std::uint64_t>(), e.at(1).get<std::uint64_t>(),
                         e.at(2).get<std::uint64_t>()});
  return out;
}

UploadState upload_state_from(std::string_view s) {
  if (s == "COMPLETED") return UploadState::Completed;
  if (s == "ABORTED") return UploadState::Aborted;
  return UploadState::Open;
}

class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw StoreError(ErrorKind::Transport, "cannot open lock file " + path.string());
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw StoreError(ErrorKind::Transport, "flock failed on " + path.string());
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

void write_file_atomic(const fs::path& path, std::string_view data) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw StoreError(ErrorKind::Transport, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

struct SimulatedStore::State {
  std::map<std::string, std::map<std::string, StoredObject>> buckets;
  std::map<std::string, StoredUpload> uploads;
  std::map<std::uint64_t, Blob> blobs;
  std::uint64_t next_blob = 1;
  std::uint64_t next_order = 1;
  std::map<std::string, std::uint64_t> completed_copies;
  std::map<std::string, std::uint64_t> uploads_started;
  std::uint64_t bytes_copied = 0;

  std::map<std::string, StoredObject>& bucket(const std::string& name) {
    auto it = buckets.find(name);
    if (it == buckets.end()) throw StoreError(ErrorKind::NoSuchBucket, name);
    return it->second;
  }

  StoredObject& object(const ObjectRef& ref) {
    auto& b = bucket(ref.bucket);
    auto it = b.find(ref.key);
    if (it == b.end()) throw StoreError(ErrorKind::NotFound, ref.str());
    return it->second;
  }

  StoredUpload& open_upload(const std::string& id) {
    auto it = uploads.find(id);
    if (it == uploads.end() || it->second.state != UploadState::Open)
      throw StoreError(ErrorKind::NoSuchUpload, id);
    return it->second;
  }
};

class SimulatedStore::InflightGuard {
 public:
  explicit InflightGuard(SimulatedStore& s) : s_(s) {
    const std::int64_t now = ++s_.inflight_;
    std::int64_t seen = s_.max_inflight_.load();
    while (now > seen && !s_.max_inflight_.compare_exchange_weak(seen, now)) {
    }
  }
  ~InflightGuard() { --s_.inflight_; }

 private:
  SimulatedStore& s_;
};

SimulatedStore::SimulatedStore(SimulatedStoreOptions options)
    : options_(std::move(options)), state_(std::make_unique<State>()) {
  if (options_.persist_dir) {
    fs::create_directories(*options_.persist_dir / "blobs");
    std::lock_guard lk(mu_);
    FileLock fl(*options_.persist_dir / "lock");
    load_state();
  }
}

SimulatedStore::~SimulatedStore() = default;

template <typename F>
auto SimulatedStore::with_state(bool mutate, F&& f) const {
  std::lock_guard lk(mu_);
  if (!options_.persist_dir) return f(*state_);
  FileLock fl(*options_.persist_dir / "lock");
  load_state();
  try {
    if constexpr (std::is_void_v<decltype(f(*state_))>) {
      f(*state_);
      if (mutate) save_state();
    } else {
      auto result = f(*state_);
      if (mutate) save_state();
      return result;
    }
  } catch (...) {
    // Force a reload so a half-applied mutation never lingers in memory.
    loaded_ino_ = 0;
    loaded_mtime_ns_ = -1;
    throw;
  }
}

void SimulatedStore::load_state() const {
  const fs::path file = *options_.persist_dir / "state.json";
  struct stat st {};
  if (::stat(file.c_str(), &st) != 0) {
    if (loaded_ino_ != 0 || loaded_mtime_ns_ != -1) *state_ = State{};
    loaded_ino_ = 0;
    loaded_mtime_ns_ = -1;
    return;
  }
  const std::int64_t mtime_ns =
      static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1'000'000'000 + st.st_mtim.tv_nsec;
  if (st.st_ino == loaded_ino_ && mtime_ns == loaded_mtime_ns_ &&
      static_cast<std::uint64_t>(st.st_size) == loaded_size_)
    return;

  std::ifstream in(file, std::ios::binary);
  json j = json::parse(in);
  State s;
  for (const auto& [bname, objs] : j.at("buckets").items()) {
    auto& b = s.buckets[bname];
    for (const auto& [key, o] : objs.items()) {
      StoredObject obj;
      obj.size = o.at("size").get<std::uint64_t>();
      obj.etag = o.at("etag").get<std::string>();
      obj.readable = o.at("readable").get<bool>();
      obj.extents = extents_from_json(o.at("extents"));
      b.emplace(key, std::move(obj));
    }
  }
  for (const auto& [id, u] : j.at("uploads").items()) {
    StoredUpload up;
    up.id = id;
    up.target = ObjectRef{u.at("bucket").get<std::string>(), u.at("key").get<std::string>()};
    up.state = upload_state_from(u.at("state").get<std::string>());
    up.created_at = u.at("created_at").get<std::int64_t>();
    up.order = u.at("order").get<std::uint64_t>();
    up.final_etag = u.value("final_etag", "");
    up.final_etags = u.value("final_etags", std::vector<std::string>{});
    for (const auto& [pn, p] : u.at("parts").items()) {
      StoredPart part;
      part.etag = p.at("etag").get<std::string>();
      part.size = p.at("size").get<std::uint64_t>();
      part.extents = extents_from_json(p.at("extents"));
      up.parts.emplace(std::stoi(pn), std::move(part));
    }
    s.uploads.emplace(id, std::move(up));
  }
  for (const auto& [id, b] : j.at("blobs").items()) {
    Blob blob;
    blob.literal = b.at("literal").get<bool>();
    blob.size = b.at("size").get<std::uint64_t>();
    blob.seed = b.at("seed").get<std::uint64_t>();
    const std::uint64_t bid = std::stoull(id);
    // Keep already-loaded literal bytes; blobs are immutable.
    if (auto old = state_->blobs.find(bid); old != state_->blobs.end()) blob.data = old->second.data;
    s.blobs.emplace(bid, std::move(blob));
  }
  s.next_blob = j.at("next_blob").get<std::uint64_t>();
  s.next_order = j.at("next_order").get<std::uint64_t>();
  j.at("completed_copies").get_to(s.completed_copies);
  j.at("uploads_started").get_to(s.uploads_started);
  s.bytes_copied = j.at("bytes_copied").get<std::uint64_t>();
  *state_ = std::move(s);
  loaded_ino_ = st.st_ino;
  loaded_mtime_ns_ = mtime_ns;
  loaded_size_ = static_cast<std::uint64_t>(st.st_size);
}

void SimulatedStore::save_state() const {
  const State& s = *state_;
  json j;
  j["buckets"] = json::object();
  for (const auto& [bname, objs] : s.buckets) {
    json b = json::object();
    for (const auto& [key, o] : objs) {
      b[key] = {{"size", o.size},
                {"etag", o.etag},
                {"readable", o.readable},
                {"extents", extents_to_json(o.extents)}};
    }
    j["buckets"][bname] = std::move(b);
  }
  j["uploads"] = json::object();
  for (const auto& [id, u] : s.uploads) {
    json parts = json::object();
    for (const auto& [pn, p] : u.parts)
      parts[std::to_string(pn)] = {
          {"etag", p.etag}, {"size", p.size}, {"extents", extents_to_json(p.extents)}};
    j["uploads"][id] = {{"bucket", u.target.bucket},
                        {"key", u.target.key},
                        {"state", to_string(u.state)},
                        {"created_at", u.created_at},
                        {"order", u.order},
                        {"final_etag", u.final_etag},
                        {"final_etags", u.final_etags},
                        {"parts", std::move(parts)}};
  }
  j["blobs"] = json::object();
  for (const auto& [id, b] : s.blobs)
    j["blobs"][std::to_string(id)] = {{"literal", b.literal}, {"size", b.size}, {"seed", b.seed}};
  j["next_blob"] = s.next_blob;
  j["next_order"] = s.next_order;
  j["completed_copies"] = s.completed_copies;
  j["uploads_started"] = s.uploads_started;
  j["bytes_copied"] = s.bytes_copied;

  const fs::path file = *options_.persist_dir / "state.json";
  write_file_atomic(file, j.dump());
  struct stat st {};
  if (::stat(file.c_str(), &st) == 0) {
    loaded_ino_ = st.st_ino;
    loaded_mtime_ns_ =
        static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1'000'000'000 + st.st_mtim.tv_nsec;
    loaded_size_ = static_cast<std::uint64_t>(st.st_size);
  }
}

void SimulatedStore::simulate_request(Op op, const std::string& identity) {
  ++requests_;
  FaultPlan plan;
  std::uint64_t occurrence = 0;
  {
    std::lock_guard lk(fault_mu_);
    plan = options_.faults;
    occurrence = occurrences_[identity]++;
  }
  const std::uint64_t h = splitmix64(plan.seed ^ fnv1a64(identity) ^ splitmix64(occurrence));
  if (plan.latency_max.count() > 0) {
    const auto span = static_cast<std::uint64_t>((plan.latency_max - plan.latency_min).count());
    const auto us = plan.latency_min.count() +
                    static_cast<std::int64_t>(span == 0 ? 0 : splitmix64(h) % (span + 1));
    std::this_thread::sleep_for(std::chrono::microseconds(us));
  }
  const bool transfer_path = op == Op::Head || op == Op::PartCopy || op == Op::DirectCopy ||
                             op == Op::Create || op == Op::Complete;
  if (transfer_path && plan.intermittent_error_rate > 0.0) {
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    if (u < plan.intermittent_error_rate)
      throw StoreError(ErrorKind::Intermittent, "injected transient failure on " + identity);
  }
}

void SimulatedStore::check_source_faults(Op, const std::string& key, const std::string& identity) {
  std::lock_guard lk(fault_mu_);
  if (options_.faults.denied_keys.contains(key))
    throw StoreError(ErrorKind::PermissionDenied, "read access denied for key " + key);
  auto forced = options_.faults.intermittent_fail_counts.find(key);
  if (forced != options_.faults.intermittent_fail_counts.end()) {
    auto [it, fresh] = forced_remaining_.try_emplace(key, forced->second);
    if (it->second > 0) {
      --it->second;
      throw StoreError(ErrorKind::Intermittent, "injected forced failure on " + identity);
    }
  }
}

void SimulatedStore::create_bucket(const std::string& bucket) {
  if (bucket.empty()) throw StoreError(ErrorKind::InvalidArgument, "empty bucket name");
  with_state(true, [&](State& s) { s.buckets.try_emplace(bucket); });
}

ObjectMeta SimulatedStore::head_object(const ObjectRef& ref) {
  ref.validate();
  const std::string identity = "head:" + ref.str();
  simulate_request(Op::Head, identity);
  check_source_faults(Op::Head, ref.key, identity);
  return with_state(false, [&](State& s) {
    const auto& obj = s.object(ref);
    if (!obj.readable) throw StoreError(ErrorKind::PermissionDenied, "read access denied for " + ref.str());
    return ObjectMeta{obj.size, obj.etag, obj.readable};
  });
}

void SimulatedStore::put_object(const ObjectRef& ref, std::string_view data) {
  ref.validate();
  auto bytes = std::make_shared<const std::string>(data);
  with_state(true, [&](State& s) {
    auto& bucket = s.bucket(ref.bucket);
    const std::uint64_t id = s.next_blob++;
    if (options_.persist_dir)
      write_file_atomic(*options_.persist_dir / "blobs" / (std::to_string(id) + ".bin"), *bytes);
    s.blobs[id] = Blob{true, bytes->size(), 0, bytes};
    StoredObject obj;
    obj.size = bytes->size();
    if (obj.size > 0) obj.extents.push_back(Extent{id, 0, obj.size});
    obj.etag = tag("literal:" + std::to_string(id) + ":" + std::to_string(obj.size));
    bucket[ref.key] = std::move(obj);
  });
}

void SimulatedStore::put_generated(const ObjectRef& ref, std::uint64_t size, std::uint64_t seed) {
  ref.validate();
  with_state(true, [&](State& s) {
    auto& bucket = s.bucket(ref.bucket);
    const std::uint64_t id = s.next_blob++;
    s.blobs[id] = Blob{false, size, seed, nullptr};
    StoredObject obj;
    obj.size = size;
    if (size > 0) obj.extents.push_back(Extent{id, 0, size});
    obj.etag = tag("pattern:" + std::to_string(seed) + ":" + std::to_string(size));
    bucket[ref.key] = std::move(obj);
  });
}

std::string SimulatedStore::copy_object(const ObjectRef& source, const ObjectRef& dest) {
  source.validate();
  dest.validate();
  InflightGuard inflight(*this);
  const std::string identity = "copy:" + source.str() + ":0";
  simulate_request(Op::DirectCopy, identity);
  check_source_faults(Op::DirectCopy, source.key, identity);
  return with_state(true, [&](State& s) {
    const StoredObject src = s.object(source);
    if (!src.readable) throw StoreError(ErrorKind::PermissionDenied, "read access denied for " + source.str());
    auto& bucket = s.bucket(dest.bucket);
    bucket[dest.key] = src;
    bucket[dest.key].readable = true;
    s.completed_copies[dest.str()]++;
    s.bytes_copied += src.size;
    return src.etag;
  });
}

MultipartUpload SimulatedStore::create_multipart(const ObjectRef& target) {
  target.validate();
  simulate_request(Op::Create, "create:" + target.str());
  return with_state(true, [&](State& s) {
    s.bucket(target.bucket);
    StoredUpload up;
    up.id = Uuid::random().str();
    up.target = target;
    up.created_at = now_ms();
    up.order = s.next_order++;
    s.uploads_started[target.str()]++;
    MultipartUpload out{up.id, target, {}, UploadState::Open};
    s.uploads.emplace(up.id, std::move(up));
    return out;
  });
}

std::string SimulatedStore::upload_part_copy(const MultipartUpload& upload, const ObjectRef& source,
                                             const PartSpec& part) {
  source.validate();
  InflightGuard inflight(*this);
  const std::string identity = "copy:" + source.str() + ":" + std::to_string(part.part_number);
  simulate_request(Op::PartCopy, identity);
  check_source_faults(Op::PartCopy, source.key, identity);
  return with_state(true, [&](State& s) {
    auto& up = s.open_upload(upload.upload_id);
    s.bucket(up.target.bucket);
    const StoredObject& src = s.object(source);
    if (!src.readable) throw StoreError(ErrorKind::PermissionDenied, "read access denied for " + source.str());
    if (part.part_number < 1 || part.part_number > 10000)
      throw StoreError(ErrorKind::InvalidArgument, "part number out of range");
    if (part.start > part.end || part.end >= src.size)
      throw StoreError(ErrorKind::RangeInvalid, "bytes=" + std::to_string(part.start) + "-" +
                                                    std::to_string(part.end) + " of " +
                                                    std::to_string(src.size));
    StoredPart stored;
    stored.size = part.length();
    stored.extents = slice(src.extents, part.start, stored.size);
    stored.etag = tag(src.etag + ":" + std::to_string(part.start) + "-" + std::to_string(part.end));
    std::string etag = stored.etag;
    up.parts[part.part_number] = std::move(stored);
    s.bytes_copied += part.length();
    return etag;
  });
}

std::string SimulatedStore::complete_multipart(MultipartUpload& upload,
                                               std::span<const std::string> etags) {
  simulate_request(Op::Complete, "complete:" + upload.target.str());
  std::vector<std::string> wanted(etags.begin(), etags.end());
  std::string final_etag = with_state(true, [&](State& s) {
    auto it = s.uploads.find(upload.upload_id);
    if (it == s.uploads.end() || it->second.state == UploadState::Aborted)
      throw StoreError(ErrorKind::NoSuchUpload, upload.upload_id);
    StoredUpload& up = it->second;
    if (up.state == UploadState::Completed) {
      if (up.final_etags == wanted) return up.final_etag;
      throw StoreError(ErrorKind::InvalidArgument, "upload " + up.id + " already completed");
    }
    if (wanted.empty()) throw StoreError(ErrorKind::MissingPart, "no parts listed");
    auto& bucket = s.bucket(up.target.bucket);
    StoredObject obj;
    std::string concat;
    for (std::size_t i = 0; i < wanted.size(); ++i) {
      const int pn = static_cast<int>(i + 1);
      auto p = up.parts.find(pn);
      if (p == up.parts.end())
        throw StoreError(ErrorKind::MissingPart, "part " + std::to_string(pn) + " not uploaded");
      if (p->second.etag != wanted[i])
        throw StoreError(ErrorKind::MissingPart, "part " + std::to_string(pn) + " etag mismatch");
      obj.extents.insert(obj.extents.end(), p->second.extents.begin(), p->second.extents.end());
      obj.size += p->second.size;
      concat += wanted[i];
    }
    obj.etag = tag(concat) + "-" + std::to_string(wanted.size());
    up.final_etag = obj.etag;
    up.final_etags = wanted;
    up.state = UploadState::Completed;
    up.parts.clear();
    bucket[up.target.key] = std::move(obj);
    s.completed_copies[up.target.str()]++;
    return up.final_etag;
  });
  upload.state = UploadState::Completed;
  upload.completed_parts.clear();
  for (std::size_t i = 0; i < wanted.size(); ++i)
    upload.completed_parts[static_cast<int>(i + 1)] = wanted[i];
  return final_etag;
}

void SimulatedStore::abort_multipart(MultipartUpload& upload) {
  with_state(true, [&](State& s) {
    auto it = s.uploads.find(upload.upload_id);
    if (it == s.uploads.end() || it->second.state != UploadState::Open) return;
    it->second.state = UploadState::Aborted;
    it->second.parts.clear();
  });
  if (upload.state == UploadState::Open) upload.state = UploadState::Aborted;
  upload.completed_parts.clear();
}

std::vector<MultipartUpload> SimulatedStore::list_incomplete_uploads(const std::string& bucket) {
  return with_state(false, [&](State& s) {
    s.bucket(bucket);
    std::vector<const StoredUpload*> open;
    for (const auto& [id, up] : s.uploads)
      if (up.state == UploadState::Open && up.target.bucket == bucket) open.push_back(&up);
    std::sort(open.begin(), open.end(),
              [](const StoredUpload* a, const StoredUpload* b) { return a->order < b->order; });
    std::vector<MultipartUpload> out;
    for (const auto* up : open) {
      MultipartUpload m{up->id, up->target, {}, up->state};
      for (const auto& [pn, p] : up->parts) m.completed_parts[pn] = p.etag;
      out.push_back(std::move(m));
    }
    return out;
  });
}

StoreMetrics SimulatedStore::instrument() const {
  StoreMetrics m = with_state(false, [&](State& s) {
    StoreMetrics out;
    out.completed_copies = s.completed_copies;
    out.uploads_started = s.uploads_started;
    out.bytes_copied = s.bytes_copied;
    return out;
  });
  m.inflight_writes = inflight_.load();
  m.max_inflight = max_inflight_.load();
  m.requests = requests_.load();
  return m;
}

void SimulatedStore::reset_max_inflight() { max_inflight_.store(inflight_.load()); }

StorageAccounting SimulatedStore::accounting() const {
  return with_state(false, [&](State& s) {
    StorageAccounting a;
    for (const auto& [name, objs] : s.buckets)
      for (const auto& [key, o] : objs) a.visible_bytes += o.size;
    for (const auto& [id, up] : s.uploads)
      if (up.state == UploadState::Open)
        for (const auto& [pn, p] : up.parts) a.open_upload_bytes += p.size;
    return a;
  });
}

std::vector<std::string> SimulatedStore::list_objects(const std::string& bucket) const {
  return with_state(false, [&](State& s) {
    std::vector<std::string> keys;
    for (const auto& [key, o] : s.bucket(bucket)) keys.push_back(key);
    return keys;
  });
}

bool SimulatedStore::exists(const ObjectRef& ref) const {
  return with_state(false, [&](State& s) {
    auto b = s.buckets.find(ref.bucket);
    return b != s.buckets.end() && b->second.contains(ref.key);
  });
}

namespace {

struct ResolvedExtent {
  Extent extent;
  Blob blob;
};

template <typename Sink>
void stream_extents(const std::vector<ResolvedExtent>& extents, Sink&& sink) {
  constexpr std::uint64_t kChunk = 1 << 20;
  std::vector<std::uint8_t> buf;
  for (const auto& r : extents) {
    if (r.blob.literal) {
      sink(std::string_view(*r.blob.data).substr(r.extent.offset, r.extent.length));
      continue;
    }
    for (std::uint64_t done = 0; done < r.extent.length; done += kChunk) {
      const std::uint64_t n = std::min(kChunk, r.extent.length - done);
      buf.resize(n);
      generate_content(r.blob.seed, r.extent.offset + done, buf);
      sink(std::string_view(reinterpret_cast<const char*>(buf.data()), n));
    }
  }
}

std::vector<ResolvedExtent> resolve_extents(SimulatedStore::State& s, const ObjectRef& ref,
                                            const std::optional<fs::path>& dir) {
  std::vector<ResolvedExtent> out;
  for (const auto& e : s.object(ref).extents) {
    Blob& b = s.blobs.at(e.blob);
    if (b.literal && !b.data) {
      std::ifstream in(*dir / "blobs" / (std::to_string(e.blob) + ".bin"), std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      b.data = std::make_shared<const std::string>(ss.str());
    }
    out.push_back(ResolvedExtent{e, b});
  }
  return out;
}

}  // namespace

std::string SimulatedStore::read_object(const ObjectRef& ref) const {
  auto extents = with_state(false, [&](State& s) {
    return resolve_extents(s, ref, options_.persist_dir);
  });
  std::string data;
  stream_extents(extents, [&](std::string_view chunk) { data.append(chunk); });
  return data;
}

std::string SimulatedStore::content_hash(const ObjectRef& ref) const {
  auto extents = with_state(false, [&](State& s) {
    return resolve_extents(s, ref, options_.persist_dir);
  });
  Sha256 sha;
  stream_extents(extents, [&](std::string_view chunk) { sha.update(chunk); });
  return sha.hex_digest();
}

void SimulatedStore::set_readable(const ObjectRef& ref, bool readable) {
  with_state(true, [&](State& s) { s.object(ref).readable = readable; });
}

void SimulatedStore::set_fault_plan(FaultPlan plan) {
  std::lock_guard lk(fault_mu_);
  options_.faults = std::move(plan);
  forced_remaining_.clear();
  occurrences_.clear();
}

FaultPlan SimulatedStore::fault_plan() const {
  std::lock_guard lk(fault_mu_);
  return options_.faults;
}

}  // namespace s3mirror::store
