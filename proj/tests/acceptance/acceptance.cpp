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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <sys/wait.h>

#include "s3mirror/durable/store.hpp"
#include "s3mirror/harness/bench.hpp"
#include "s3mirror/harness/client.hpp"
#include "s3mirror/harness/cost.hpp"
#include "s3mirror/harness/dataset.hpp"
#include "s3mirror/harness/process.hpp"
#include "s3mirror/harness/report.hpp"
#include "s3mirror/harness/scenario.hpp"
#include "s3mirror/store/simulated_store.hpp"
#include "s3mirror/transfer/copy.hpp"
#include "s3mirror/transfer/engine.hpp"
#include "support.hpp"

namespace {

using namespace s3mirror;
using namespace std::chrono_literals;
using nlohmann::json;
using s3mirror::testing::TempDir;
using store::kMiB;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Hash checks collected from every suite for the content criterion.
struct Fidelity {
  struct Entry {
    std::string suite;
    std::size_t checked = 0;
    std::vector<std::string> mismatches;
  };
  std::vector<Entry> entries;

  void add(std::string suite, std::size_t checked, std::vector<std::string> mismatches) {
    entries.push_back({std::move(suite), checked, std::move(mismatches)});
  }
  // Compares every SUCCESS task's destination with its source.
  void check(const std::string& suite, const store::SimulatedStore& sim, const transfer::TransferStatusSnapshot& s,
             const std::string& src, const std::string& dst) {
    std::size_t n = 0;
    std::vector<std::string> bad;
    for (const auto& t : s.tasks) {
      if (t.status != transfer::FileStatus::Success) continue;
      ++n;
      if (sim.content_hash({src, t.key}) != sim.content_hash({dst, t.key})) bad.push_back(t.key);
    }
    add(suite, n, std::move(bad));
  }
};

Fidelity fidelity;

transfer::EngineConfig small_config() {
  transfer::EngineConfig c;
  c.part_size_bounds = {64 * 1024, 128 * kMiB};
  c.part_size = 64 * 1024;
  c.file_parallelism = 4;
  c.queue = {8, 8};
  c.poll_interval = 50ms;
  c.verify = transfer::VerifyMode::Size;
  return c;
}

// Runtime plus engine over a caller-owned store.
struct Local {
  TempDir dir{"s3mirror-acceptance"};
  durable::Runtime runtime;
  transfer::TransferEngine engine;

  Local(store::ObjectStore& via, const transfer::EngineConfig& config)
      : runtime([this] {
          durable::RuntimeOptions o;
          o.db_path = dir.file("accept.db");
          o.idle_poll = 10ms;
          return o;
        }()),
        engine(runtime, via, config) {
    runtime.launch();
  }
  ~Local() { runtime.shutdown(); }

  std::optional<transfer::TransferStatusSnapshot> run(const std::vector<std::string>& keys) {
    transfer::TransferRequest r;
    r.source_bucket = "src";
    r.dest_bucket = "dst";
    r.keys = keys;
    r.part_size = engine.config().part_size;
    r.file_parallelism = engine.config().file_parallelism;
    auto h = engine.start(r);
    if (!h.wait(300s)) return std::nullopt;
    return engine.status(h.id());
  }
};

std::vector<std::string> seed_dataset(store::SimulatedStore& sim, const harness::DatasetSpec& spec) {
  sim.create_bucket("src");
  sim.create_bucket("dst");
  return harness::keys_of(harness::generate_dataset(sim, spec, "src"));
}

// Timestamps source HEADs per key; everything else passes through.
class HeadRecorder final : public store::ObjectStore {
 public:
  explicit HeadRecorder(store::ObjectStore& inner) : inner_(inner) {}

  std::vector<Clock::time_point> heads(const std::string& key) {
    std::lock_guard lk(mu_);
    return heads_[key];
  }

  void create_bucket(const std::string& b) override { inner_.create_bucket(b); }
  store::ObjectMeta head_object(const store::ObjectRef& r) override {
    if (r.bucket == "src") {
      std::lock_guard lk(mu_);
      heads_[r.key].push_back(Clock::now());
    }
    return inner_.head_object(r);
  }
  void put_object(const store::ObjectRef& r, std::string_view d) override { inner_.put_object(r, d); }
  std::string copy_object(const store::ObjectRef& s, const store::ObjectRef& d) override {
    return inner_.copy_object(s, d);
  }
  store::MultipartUpload create_multipart(const store::ObjectRef& t) override { return inner_.create_multipart(t); }
  std::string upload_part_copy(const store::MultipartUpload& u, const store::ObjectRef& s,
                               const store::PartSpec& p) override {
    return inner_.upload_part_copy(u, s, p);
  }
  std::string complete_multipart(store::MultipartUpload& u, std::span<const std::string> e) override {
    return inner_.complete_multipart(u, e);
  }
  void abort_multipart(store::MultipartUpload& u) override { inner_.abort_multipart(u); }
  std::vector<store::MultipartUpload> list_incomplete_uploads(const std::string& b) override {
    return inner_.list_incomplete_uploads(b);
  }

 private:
  store::ObjectStore& inner_;
  std::mutex mu_;
  std::map<std::string, std::vector<Clock::time_point>> heads_;
};

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("s3mirror-acceptance-" + std::to_string(::getpid()) + "-" + name);
}

// 1
Outcome crash_recovery() {
  harness::ScenarioOptions o;
  o.mirror_binary = MIRROR_BINARY;
  o.work_dir = scratch("crash");
  o.dataset = harness::DatasetSpec::fixed(50, 16 * kMiB);
  o.engine.part_size = 8 * kMiB;
  o.engine.queue = {16, 8};
  o.engine.poll_interval = 100ms;
  o.engine.verify = transfer::VerifyMode::Size;
  o.faults = store::FaultPlan::fixed_latency(20ms);
  o.kill_after = {30};
  o.timeout = 120s;
  const auto report = harness::run_crash_scenario(o);
  std::filesystem::remove_all(o.work_dir);

  const auto& snap = report.final_snapshot;
  fidelity.add("crash recovery", snap ? snap->counts.success : 0, report.content_mismatches);
  if (!snap) return {false, "no final snapshot"};
  if (report.crashes.size() != 1 || !report.crashes[0].exited_nonzero) return {false, "service did not crash"};
  const auto& before = report.crashes[0].success_before;

  std::size_t duplicated = 0;
  for (const auto& k : before) {
    auto it = report.completed_copies.find(k);
    if (it == report.completed_copies.end() || it->second != 1) ++duplicated;
  }
  std::size_t outside = 0;
  for (const auto& k : report.re_executed) outside += before.contains(k);

  const bool pass = snap->counts.success == 50 && snap->complete && before.size() >= 30 && duplicated == 0 &&
                    outside == 0 && report.re_executed.size() <= 50 - before.size() && report.duration < 60.0;
  return {pass, fmt("%zu/50 SUCCESS; %zu done before crash, %zu copied more than once; %zu re-executed, %zu of them "
                    "already done; %.1fs",
                    snap->counts.success, before.size(), duplicated, report.re_executed.size(), outside,
                    report.duration)};
}

// 2
Outcome retry_semantics() {
  store::SimulatedStore sim;
  auto keys = seed_dataset(sim, harness::DatasetSpec::fixed(40, 256 * 1024, 2));
  store::FaultPlan faults;
  std::set<std::string> affected;
  for (std::size_t i = 0; i < 40; i += 4) {
    faults.intermittent_fail_counts[keys[i]] = 2;
    affected.insert(keys[i]);
  }
  sim.set_fault_plan(faults);
  HeadRecorder rec(sim);
  auto cfg = small_config();
  cfg.retry_base_delay = 100ms;
  cfg.retry_backoff_factor = 2.0;
  cfg.retry_max_attempts = 3;
  Local local(rec, cfg);
  auto snap = local.run(keys);
  if (!snap) return {false, "transfer did not finish"};
  fidelity.check("retry", sim, *snap, "src", "dst");

  std::size_t wrong_attempts = 0;
  double lo = 1e9, hi = 0;
  for (const auto& t : snap->tasks) {
    const int want = affected.contains(t.key) ? 3 : 1;
    if (t.attempts != want) ++wrong_attempts;
    if (!affected.contains(t.key)) continue;
    auto h = rec.heads(t.key);
    if (h.size() < 3) {
      lo = 0;
      continue;
    }
    const double d1 = std::chrono::duration<double>(h[1] - h[0]).count();
    const double d2 = std::chrono::duration<double>(h[2] - h[1]).count();
    const double ratio = d2 / d1;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double f = cfg.retry_backoff_factor;
  const bool pass = snap->counts.success == 40 && wrong_attempts == 0 && lo >= f * 0.75 && hi <= f * 1.25;
  return {pass, fmt("%zu/40 SUCCESS; %zu wrong attempt counts; delay ratio %.2f..%.2f (factor %.1f)",
                    snap->counts.success, wrong_attempts, lo, hi, f)};
}

// 3
Outcome permanent_isolation() {
  store::SimulatedStore sim;
  auto keys = seed_dataset(sim, harness::DatasetSpec::fixed(40, 256 * 1024, 3));
  store::FaultPlan faults;
  for (std::size_t i = 3; i < 40; i += 8) faults.denied_keys.insert(keys[i]);
  sim.set_fault_plan(faults);
  Local local(sim, small_config());
  auto snap = local.run(keys);
  if (!snap) return {false, "transfer did not finish"};
  fidelity.check("permanent failure", sim, *snap, "src", "dst");

  std::size_t identified = 0, retried = 0, wrong = 0;
  for (const auto& t : snap->tasks) {
    const bool denied = faults.denied_keys.contains(t.key);
    if (denied != (t.status == transfer::FileStatus::Failed)) ++wrong;
    if (!denied) continue;
    if (t.error && t.error->find("PermissionDenied") != std::string::npos && t.error->find(t.key) != std::string::npos)
      ++identified;
    if (t.attempts != 1) ++retried;
  }
  const bool pass = snap->complete && snap->counts.failed == 5 && snap->counts.success == 35 && identified == 5 &&
                    retried == 0 && wrong == 0;
  return {pass, fmt("%zu FAILED (%zu name key and PermissionDenied), %zu SUCCESS, %zu retried, complete=%d",
                    snap->counts.failed, identified, snap->counts.success, retried, snap->complete ? 1 : 0)};
}

// 4
Outcome throttle_ceiling() {
  store::SimulatedStore sim({store::FaultPlan::fixed_latency(2ms), std::nullopt});
  auto keys = seed_dataset(sim, harness::DatasetSpec::fixed(200, 512 * 1024, 4));
  sim.reset_max_inflight();
  auto cfg = small_config();
  cfg.file_parallelism = 8;
  cfg.queue = {32, 32};
  cfg.throttle = transfer::ThrottleConfig::partitioned(64, 1);
  Local local(sim, cfg);
  auto snap = local.run(keys);
  if (!snap) return {false, "transfer did not finish"};
  fidelity.check("throttle", sim, *snap, "src", "dst");
  const auto peak = sim.instrument().max_inflight;
  const bool pass = snap->counts.success == 200 && peak > 0 && peak <= 64;
  return {pass, fmt("peak in-flight %lld with cap 64 (up to 256 requested); %zu/200 SUCCESS",
                    static_cast<long long>(peak), snap->counts.success)};
}

// 5
struct SnapshotChecker {
  std::size_t files;
  std::uint64_t last_bytes = 0;
  std::map<std::string, transfer::FileStatus> terminal;
  std::vector<std::string> problems;

  void check(const harness::HttpReply& reply, const Uuid& id) {
    if (reply.status != 200) return problems.push_back(fmt("HTTP %d", reply.status));
    transfer::TransferStatusSnapshot s;
    try {
      s = json::parse(reply.body).get<transfer::TransferStatusSnapshot>();
    } catch (const std::exception& e) {
      return problems.push_back(std::string("unparsable: ") + e.what());
    }
    if (s.workflow_id != id) problems.push_back("wrong id");
    if (s.tasks.size() != files) problems.push_back("task count");
    transfer::StatusCounts c;
    std::uint64_t done = 0;
    for (const auto& t : s.tasks) {
      switch (t.status) {
        case transfer::FileStatus::Pending: ++c.pending; break;
        case transfer::FileStatus::InProgress: ++c.in_progress; break;
        case transfer::FileStatus::Success: ++c.success; done += t.size.value_or(0); break;
        case transfer::FileStatus::Failed: ++c.failed; break;
      }
      auto seen = terminal.find(t.key);
      if (seen != terminal.end() && seen->second != t.status) problems.push_back("reverted " + t.key);
      if (transfer::is_terminal(t.status)) terminal[t.key] = t.status;
    }
    if (!(c == s.counts)) problems.push_back("counts disagree with tasks");
    if (done != s.bytes_done || s.bytes_done > s.bytes_total) problems.push_back("byte totals");
    if (s.bytes_done < last_bytes) problems.push_back("bytes_done went backwards");
    last_bytes = s.bytes_done;
  }
};

Outcome observability() {
  const auto work = scratch("observe");
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);
  const std::size_t files = 48;
  {
    store::SimulatedStore sim({{}, work / "sim"});
    sim.create_bucket("src");
    for (const char* b : {"dst_a", "dst_b"}) sim.create_bucket(b);
    harness::generate_dataset(sim, harness::DatasetSpec::fixed(files, 2 * kMiB, 5), "src");
  }
  std::ofstream(work / "config.json")
      << json{{"part_size_min", 65536}, {"part_size", 1 * kMiB}, {"file_parallelism", 4},
              {"queue", {{"concurrency", 4}, {"worker_concurrency", 4}}}, {"poll_interval_ms", 50}}
             .dump();
  std::ofstream(work / "faults.json") << json{{"latency_ms", 50}}.dump();

  auto serve = [&](int port, const std::string& log) {
    std::vector<std::string> args{"serve",       "--db",     (work / "m.db").string(),
                                  "--sim-dir",   (work / "sim").string(), "--listen",
                                  "127.0.0.1:" + std::to_string(port), "--config", (work / "config.json").string(),
                                  "--faults",    (work / "faults.json").string(), "--log-level", "warn"};
    return std::make_unique<harness::ChildProcess>(MIRROR_BINARY, args,
                                                   std::map<std::string, std::string>{{"MIRROR_TEST_MODE", "1"}},
                                                   work / log);
  };
  int port = harness::pick_free_port();
  auto child = serve(port, "serve1.log");
  harness::ServiceClient client("127.0.0.1", port);
  if (!client.wait_healthy(20s)) return {false, "service did not start"};

  auto keys = harness::keys_of(harness::plan_dataset(harness::DatasetSpec::fixed(files, 2 * kMiB, 5)));
  auto start = [&](const std::string& dst) -> std::optional<Uuid> {
    auto r = client.start_transfer(json{{"source_bucket", "src"}, {"dest_bucket", dst}, {"keys", keys}});
    if (r.status != 200) return std::nullopt;
    return Uuid::parse(json::parse(r.body).at("workflow_id").get<std::string>());
  };

  // Unpolled: completion is read from the database, not the service.
  auto unpolled = start("dst_a");
  if (!unpolled) return {false, "start rejected"};
  {
    durable::DurableStore db((work / "m.db").string());
    const auto deadline = Clock::now() + 120s;
    while (Clock::now() < deadline) {
      auto w = db.get_workflow(*unpolled);
      if (w && w->status != durable::WorkflowStatus::Pending) break;
      std::this_thread::sleep_for(200ms);
    }
  }
  auto a = client.snapshot(*unpolled);
  if (!a || !a->complete) return {false, "unpolled run did not finish"};

  auto polled = start("dst_b");
  if (!polled) return {false, "start rejected"};
  SnapshotChecker checker{files};
  std::size_t polls = 0;
  std::optional<transfer::TransferStatusSnapshot> b;
  const auto deadline = Clock::now() + 120s;
  while (Clock::now() < deadline) {
    const auto next = Clock::now() + 100ms;
    auto reply = client.transfer_status(*polled);
    ++polls;
    checker.check(reply, *polled);
    if (reply.status == 200) {
      auto s = json::parse(reply.body).get<transfer::TransferStatusSnapshot>();
      if (s.complete) {
        b = s;
        break;
      }
    }
    std::this_thread::sleep_until(next);
  }
  if (!b) return {false, "polled run did not finish"};

  client.crash();
  child->wait(10s);
  port = harness::pick_free_port();
  child = serve(port, "serve2.log");
  harness::ServiceClient after("127.0.0.1", port);
  bool served = after.wait_healthy(20s);
  auto again = served ? after.snapshot(*polled) : std::nullopt;
  served = again && again->complete && again->bytes_done == b->bytes_done && again->counts == b->counts &&
           std::abs(again->elapsed - b->elapsed) < 1e-6;
  child->terminate();

  {
    store::SimulatedStore sim({{}, work / "sim"});
    fidelity.check("observability (unpolled)", sim, *a, "src", "dst_a");
    fidelity.check("observability (polled)", sim, *b, "src", "dst_b");
  }
  std::filesystem::remove_all(work);

  const double inflation = b->elapsed / a->elapsed - 1.0;
  const bool pass = checker.problems.empty() && polls >= 10 && inflation < 0.10 && served &&
                    a->counts.success == files && b->counts.success == files;
  std::string detail = fmt("%zu polls, %zu invalid; unpolled %.2fs, polled %.2fs (%+.1f%%); served after restart: %s",
                           polls, checker.problems.size(), a->elapsed, b->elapsed, inflation * 100.0,
                           served ? "yes" : "no");
  if (!checker.problems.empty()) detail += "; first problem: " + checker.problems.front();
  return {pass, detail};
}

// 6
Outcome leak_cleanup() {
  harness::ScenarioOptions o;
  o.mirror_binary = MIRROR_BINARY;
  o.work_dir = scratch("leak");
  o.dataset.file_count = 24;
  o.dataset.min_size = 2 * kMiB;
  o.dataset.max_size = 8 * kMiB;
  o.dataset.seed = 6;
  o.engine.part_size_bounds = {256 * 1024, 128 * kMiB};
  o.engine.part_size = 256 * 1024;
  o.engine.file_parallelism = 1;
  o.engine.queue = {4, 4};
  o.engine.poll_interval = 100ms;
  o.faults = store::FaultPlan::fixed_latency(20ms);
  o.kill_after = {2};
  o.restart_after_last = false;
  o.timeout = 120s;
  const auto report = harness::run_crash_scenario(o);

  store::SimulatedStore sim({{}, report.sim_dir});
  const std::size_t open = sim.list_incomplete_uploads("dest").size();
  const auto before = sim.accounting();
  const std::size_t aborted = transfer::cleanup_leaks(sim, "dest");
  const auto after = sim.accounting();
  const std::size_t again = transfer::cleanup_leaks(sim, "dest");

  // Visible bytes recomputed object by object.
  std::uint64_t visible = 0;
  std::size_t copied = 0;
  std::vector<std::string> bad;
  for (const char* bucket : {"source", "dest"})
    for (const auto& k : sim.list_objects(bucket)) visible += sim.head_object({bucket, k}).size;
  for (const auto& k : sim.list_objects("dest")) {
    ++copied;
    if (sim.content_hash({"dest", k}) != sim.content_hash({"source", k})) bad.push_back(k);
  }
  fidelity.add("leak cleanup", copied, bad);
  const bool drained = sim.list_incomplete_uploads("dest").empty();
  std::filesystem::remove_all(o.work_dir);

  const bool pass = open > 0 && aborted == open && after.open_upload_bytes == 0 && after.total() == visible &&
                    again == 0 && drained;
  return {pass, fmt("%zu open after crash (%llu bytes held); aborted %zu; open bytes now %llu, total %llu vs "
                    "visible %llu; second cleanup %zu",
                    open, static_cast<unsigned long long>(before.open_upload_bytes), aborted,
                    static_cast<unsigned long long>(after.open_upload_bytes),
                    static_cast<unsigned long long>(after.total()), static_cast<unsigned long long>(visible), again)};
}

// 7
Outcome part_math() {
  std::mt19937_64 rng(20261016);
  std::size_t bad = 0;
  std::string first_bad;
  for (int i = 0; i < 10'000; ++i) {
    std::uint64_t size = 0;
    switch (i % 4) {
      case 0: size = rng() % 5'000; break;
      case 1: size = rng() % (64 * kMiB); break;
      case 2: size = rng() % (5ull << 40); break;
      default: size = (rng() % 64 + 1) * (rng() % (1 << 20) + 1); break;
    }
    // Keep the part count bounded so the oracle stays cheap.
    const std::uint64_t floor = size / 20'000 + 1;
    const std::uint64_t part = floor + rng() % (std::max<std::uint64_t>(size, 1) + 1);
    const auto parts = store::compute_parts(size, part);

    bool ok = true;
    if (size <= 5'000) {
      // Paint every byte; each must be owned exactly once.
      std::vector<int> owner(size, 0);
      for (const auto& p : parts)
        for (std::uint64_t b = p.start; b <= p.end && b < size; ++b) ++owner[b];
      for (std::uint64_t b = 0; b < size; ++b) ok &= owner[b] == 1;
    }
    std::uint64_t cursor = 0;
    for (std::size_t n = 0; n < parts.size(); ++n) {
      const auto& p = parts[n];
      ok &= p.part_number == static_cast<int>(n + 1);
      ok &= p.start == cursor && p.end >= p.start && p.end < size;
      ok &= n + 1 == parts.size() ? p.length() <= part : p.length() == part;
      cursor = p.end + 1;
    }
    ok &= cursor == size;
    if (!ok && bad++ == 0) first_bad = fmt("(%llu, %llu)", static_cast<unsigned long long>(size),
                                           static_cast<unsigned long long>(part));
  }
  const auto canonical = store::compute_parts(100 * kMiB, 16 * kMiB);
  const bool seven = canonical.size() == 7 && canonical.back().length() == 4 * kMiB;
  return {bad == 0 && seven, fmt("%zu of 10000 random pairs mis-tiled%s%s; 100 MiB / 16 MiB -> %zu parts",
                                 bad, bad ? " first " : "", first_bad.c_str(), canonical.size())};
}

// 8
Outcome rate_and_cost_arithmetic() {
  using namespace harness;
  const double bytes = 11.88 * kTiB;
  const double fast_min = transfer_seconds(bytes, 24.9 * kGiB) / 60.0;
  const double slow_h = transfer_seconds(bytes, 200.0 * 1024 * 1024) / 3600.0;
  const double rounded_h = transfer_seconds(bytes, 0.2 * kGiB) / 3600.0;
  const auto r = report_benchmark(static_cast<std::uint64_t>(bytes), fast_min * 60.0);
  const auto datasync = compute_cost(static_cast<std::uint64_t>(std::llround(bytes)), PerGbPricing{});
  const auto cpu = compute_cost(2'000'000, PerCpuMsPricing{});
  const bool pass = std::abs(fast_min - 8.1) <= 0.1 && slow_h >= 17.0 && std::abs(r.rate_gib_s() - 24.9) < 1e-9 &&
                    datasync.str() == "$183.03" && cpu.str() == "$0.10";
  return {pass, fmt("24.9 GiB/s -> %.2f min; 200 MiB/s -> %.2f h (0.2 GiB/s exactly -> %.2f h); %s and %s",
                    fast_min, slow_h, rounded_h, datasync.str().c_str(), cpu.str().c_str())};
}

// 9
Outcome parallel_speedup() {
  const auto t0 = Clock::now();
  std::map<int, double> elapsed;
  for (int c : {1, 2, 4, 8}) {
    harness::BenchOptions o;
    o.dataset = harness::DatasetSpec::fixed(16, 64 * 1024, 9);
    o.engine.part_size_bounds = {64 * 1024, 128 * kMiB};
    o.engine.part_size = 64 * 1024;
    o.engine.file_parallelism = 1;
    o.engine.queue = {c, c};
    o.engine.poll_interval = 50ms;
    o.faults = store::FaultPlan::fixed_latency(50ms);
    auto res = harness::run_bench(o);
    fidelity.add(fmt("speedup c=%d", c), res.snapshot.counts.success, res.content_mismatches);
    if (res.snapshot.counts.success != 16) return {false, fmt("c=%d: %zu/16 SUCCESS", c, res.snapshot.counts.success)};
    elapsed[c] = res.snapshot.elapsed;
  }
  const double total = std::chrono::duration<double>(Clock::now() - t0).count();
  bool pass = total < 300.0;
  std::string detail = fmt("serial %.2fs", elapsed[1]);
  for (int c : {2, 4, 8}) {
    const double s = elapsed[1] / elapsed[c];
    pass &= s >= c / 2.0;
    detail += fmt("; c=%d %.2fx (need %.1f)", c, s, c / 2.0);
  }
  return {pass, detail + fmt("; suite %.1fs", total)};
}

// 10
Outcome content_fidelity() {
  std::size_t checked = 0, bad = 0;
  std::string where;
  bool every_suite_checked = true;
  for (const auto& e : fidelity.entries) {
    checked += e.checked;
    bad += e.mismatches.size();
    every_suite_checked &= e.checked > 0;
    if (!e.mismatches.empty() && where.empty()) where = e.suite + ": " + e.mismatches.front();
  }
  const bool pass = !fidelity.entries.empty() && bad == 0 && every_suite_checked;
  return {pass, fmt("%zu SUCCESS files hashed across %zu suites, %zu mismatched%s%s", checked,
                    fidelity.entries.size(), bad, where.empty() ? "" : "; ", where.c_str())};
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"crash recovery", crash_recovery},           {"retry semantics", retry_semantics},
      {"permanent failure isolation", permanent_isolation}, {"throttle ceiling", throttle_ceiling},
      {"observability", observability},             {"leak cleanup", leak_cleanup},
      {"part math", part_math},                     {"rate and cost arithmetic", rate_and_cost_arithmetic},
      {"parallel speedup", parallel_speedup},       {"content fidelity", content_fidelity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.contains(i + 1)) continue;
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    failed += !out.pass;
    std::printf("%s  %2zu %-28s %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
