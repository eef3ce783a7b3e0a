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

#include <signal.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "s3mirror/harness/bench.hpp"
#include "s3mirror/harness/client.hpp"
#include "s3mirror/harness/scenario.hpp"
#include "s3mirror/service/server.hpp"
#include "s3mirror/store/simulated_store.hpp"
#include "s3mirror/store/wire_store.hpp"
#include "s3mirror/transfer/engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace s3mirror;

namespace {

// Values left unset fall through to the config file, then to defaults.
struct CliConfig {
  std::optional<std::string> config_path;
  std::optional<std::string> db;
  std::optional<std::string> listen;
  std::optional<std::string> backend;
  std::optional<std::string> sim_dir;
  std::optional<std::string> faults_path;
  std::optional<std::string> worker_id;
  std::optional<bool> test_mode;
  std::optional<std::uint64_t> part_size;
  std::optional<int> file_parallelism;
  std::optional<int> concurrency;
  std::optional<int> worker_concurrency;
  std::optional<int> max_inflight;
  std::optional<int> max_workers;
  std::string log_level = "info";
};

struct Resolved {
  std::string db = "mirror.db";
  service::ListenAddress listen;
  std::string backend = "sim";
  std::string sim_dir = "mirror-sim";
  std::optional<std::string> faults_path;
  std::string worker_id = "local";
  bool test_mode = false;
  transfer::EngineConfig engine;
};

class Failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Failure(path + ": " + e.what());
  }
}

Resolved resolve(const CliConfig& c) {
  Resolved r;
  r.engine.verify = transfer::VerifyMode::Size;
  json file = json::object();
  if (c.config_path) file = read_json_file(*c.config_path);
  transfer::from_json(file, r.engine);
  r.db = c.db.value_or(file.value("db", r.db));
  r.listen = service::ListenAddress::parse(c.listen.value_or(file.value("listen", r.listen.str())));
  r.backend = c.backend.value_or(file.value("backend", r.backend));
  r.sim_dir = c.sim_dir.value_or(file.value("sim_dir", r.sim_dir));
  if (c.faults_path) r.faults_path = c.faults_path;
  else if (file.contains("faults")) r.faults_path = file.at("faults").get<std::string>();
  r.worker_id = c.worker_id.value_or(file.value("worker_id", r.worker_id));
  r.test_mode = c.test_mode.value_or(file.value("test_mode", r.test_mode));
  if (c.part_size) r.engine.part_size = *c.part_size;
  if (c.file_parallelism) r.engine.file_parallelism = *c.file_parallelism;
  if (c.concurrency) r.engine.queue.concurrency = *c.concurrency;
  if (c.worker_concurrency) r.engine.queue.worker_concurrency = *c.worker_concurrency;
  if (c.max_inflight || c.max_workers) {
    const int global = c.max_inflight.value_or(r.engine.throttle.global_max_inflight);
    r.engine.throttle = transfer::ThrottleConfig::partitioned(global, c.max_workers.value_or(1));
  }
  if (r.backend != "sim" && r.backend != "wire") throw Failure("backend must be 'sim' or 'wire'");
  r.engine.validate();
  return r;
}

std::unique_ptr<store::ObjectStore> open_store(const Resolved& r) {
  if (r.backend == "wire") return std::make_unique<store::WireStore>(store::WireStoreOptions::from_env());
  store::SimulatedStoreOptions o;
  o.persist_dir = r.sim_dir;
  if (r.faults_path) o.faults = read_json_file(*r.faults_path).get<store::FaultPlan>();
  return std::make_unique<store::SimulatedStore>(std::move(o));
}

std::string fmt_bytes(std::optional<std::uint64_t> b) {
  if (!b) return "-";
  char buf[32];
  const double v = static_cast<double>(*b);
  if (v >= 1024.0 * 1024 * 1024) std::snprintf(buf, sizeof buf, "%.2f GiB", v / (1024.0 * 1024 * 1024));
  else if (v >= 1024.0 * 1024) std::snprintf(buf, sizeof buf, "%.2f MiB", v / (1024.0 * 1024));
  else if (v >= 1024.0) std::snprintf(buf, sizeof buf, "%.2f KiB", v / 1024.0);
  else std::snprintf(buf, sizeof buf, "%llu B", static_cast<unsigned long long>(*b));
  return buf;
}

void render(const transfer::TransferStatusSnapshot& s, std::ostream& out) {
  std::size_t width = 3;
  for (const auto& t : s.tasks) width = std::max(width, t.key.size());
  char line[256];
  for (const auto& t : s.tasks) {
    std::string dur = t.duration ? std::to_string(*t.duration).substr(0, std::to_string(*t.duration).find('.') + 4) + "s" : "-";
    std::snprintf(line, sizeof line, "%-*s  %-11s  %12s  %10s  %d", static_cast<int>(width), t.key.c_str(),
                  std::string(transfer::to_string(t.status)).c_str(), fmt_bytes(t.size).c_str(), dur.c_str(),
                  t.attempts);
    out << line;
    if (t.error) out << "  " << *t.error;
    out << "\n";
  }
  std::snprintf(line, sizeof line,
                "%s: %zu success, %zu failed, %zu in progress, %zu pending; %s of %s in %.3fs (%.2f MiB/s)%s\n",
                s.workflow_id.str().c_str(), s.counts.success, s.counts.failed, s.counts.in_progress,
                s.counts.pending, fmt_bytes(s.bytes_done).c_str(), fmt_bytes(s.bytes_total).c_str(),
                s.elapsed, s.overall_rate / (1024.0 * 1024.0), s.complete ? ", complete" : "");
  out << line;
}

int cmd_serve(const Resolved& r) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto store = open_store(r);
  durable::RuntimeOptions ro;
  ro.db_path = r.db;
  ro.worker_id = r.worker_id;
  durable::Runtime runtime(ro);
  transfer::TransferEngine engine(runtime, *store, r.engine);
  service::ServerOptions so;
  so.listen = r.listen;
  so.test_mode = r.test_mode;
  service::Server server(engine, so);

  auto report = runtime.launch();
  for (const auto& [id, why] : report.unrecoverable) spdlog::warn("not recovering {}: {}", id.str(), why);
  server.start();
  spdlog::info("worker {} serving on {} (db {}, backend {})", r.worker_id, r.listen.str(), r.db, r.backend);

  int sig = 0;
  sigwait(&signals, &sig);
  spdlog::info("signal {}, shutting down", sig);
  server.stop();
  runtime.shutdown();
  return 0;
}

harness::ServiceClient client_for(const Resolved& r) {
  return harness::ServiceClient(r.listen.host == "0.0.0.0" ? "127.0.0.1" : r.listen.host, r.listen.port);
}

int cmd_transfer(const Resolved& r, json body, std::optional<std::string> workflow_id, bool wait,
                 bool as_json, int poll_ms) {
  if (workflow_id) body["workflow_id"] = *workflow_id;
  auto client = client_for(r);
  auto reply = client.start_transfer(body);
  if (reply.status == 0) throw Failure("cannot reach service at " + r.listen.str());
  if (!reply.ok()) {
    std::string msg = reply.body;
    try {
      msg = json::parse(reply.body).value("error", reply.body);
    } catch (const json::exception&) {
    }
    throw Failure("start_transfer rejected (HTTP " + std::to_string(reply.status) + "): " + msg);
  }
  const auto id = Uuid::parse(json::parse(reply.body).at("workflow_id").get<std::string>());
  if (!wait) {
    std::cout << (as_json ? reply.body : id->str()) << "\n";
    return 0;
  }
  std::optional<transfer::TransferStatusSnapshot> snap;
  for (;;) {
    snap = client.snapshot(*id);
    if (snap && snap->complete) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(poll_ms));
  }
  if (as_json) std::cout << json(*snap).dump(2) << "\n";
  else render(*snap, std::cout);
  if (snap->counts.failed == 0) return 0;
  std::string failed;
  for (const auto& t : snap->tasks)
    if (t.status == transfer::FileStatus::Failed) failed += (failed.empty() ? "" : ", ") + t.key;
  std::cerr << "mirror: " << snap->counts.failed << " file(s) failed: " << failed << "\n";
  return 1;
}

int cmd_status(const Resolved& r, const std::string& id_text, bool as_json) {
  auto id = Uuid::parse(id_text);
  if (!id) throw Failure("not found: " + id_text + " is not a UUID");
  auto client = client_for(r);
  auto reply = client.transfer_status(*id);
  if (reply.status == 0) throw Failure("cannot reach service at " + r.listen.str());
  if (reply.status == 404) throw Failure("not found: " + id_text);
  if (!reply.ok()) throw Failure("status failed (HTTP " + std::to_string(reply.status) + ")");
  if (as_json) {
    std::cout << json::parse(reply.body).dump(2) << "\n";
  } else {
    render(json::parse(reply.body).get<transfer::TransferStatusSnapshot>(), std::cout);
  }
  return 0;
}

int cmd_cleanup(const Resolved& r, const std::string& bucket, bool as_json) {
  auto store = open_store(r);
  const auto n = transfer::cleanup_leaks(*store, bucket);
  if (as_json) std::cout << json{{"bucket", bucket}, {"aborted", n}}.dump() << "\n";
  else std::cout << "aborted " << n << " incomplete upload(s) in " << bucket << "\n";
  return 0;
}

int cmd_gen_dataset(const Resolved& r, const harness::DatasetSpec& spec, const std::string& bucket,
                    bool as_json) {
  auto store = open_store(r);
  store->create_bucket(bucket);
  const auto manifest = harness::generate_dataset(*store, spec, bucket);
  if (as_json) {
    json out = json::array();
    for (const auto& e : manifest) out.push_back({{"key", e.key}, {"size", e.size}});
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& e : manifest) std::cout << e.key << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Durable server-side bucket mirroring"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "mirror 0.1.0");

  CliConfig c;
  app.add_option("--config", c.config_path, "JSON configuration file")->envname("MIRROR_CONFIG");
  app.add_option("--db", c.db, "Durable state database path")->envname("MIRROR_DB");
  app.add_option("--listen", c.listen, "Service address host:port")->envname("MIRROR_LISTEN");
  app.add_option("--backend", c.backend, "sim or wire")->envname("MIRROR_BACKEND");
  app.add_option("--sim-dir", c.sim_dir, "Simulated store directory")->envname("MIRROR_SIM_DIR");
  app.add_option("--faults", c.faults_path, "Fault plan JSON for the simulated store")->envname("MIRROR_FAULTS");
  app.add_option("--worker-id", c.worker_id, "Executor identity")->envname("MIRROR_WORKER_ID");
  app.add_option("--test-mode", c.test_mode, "Enable POST /crash")->envname("MIRROR_TEST_MODE");
  app.add_option("--part-size", c.part_size, "Part size in bytes");
  app.add_option("--file-parallelism", c.file_parallelism, "Concurrent part copies per file");
  app.add_option("--concurrency", c.concurrency, "Queue-wide concurrent files");
  app.add_option("--worker-concurrency", c.worker_concurrency, "Concurrent files per worker");
  app.add_option("--max-inflight", c.max_inflight, "Global in-flight request ceiling");
  app.add_option("--max-workers", c.max_workers, "Worker count sharing the ceiling");
  app.add_option("--log-level", c.log_level, "trace, debug, info, warn, error")->capture_default_str();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service and queue workers");

  auto* transfer_cmd = app.add_subcommand("transfer", "Start a transfer through the service");
  std::string source, dest, prefix, keys_file;
  std::vector<std::string> keys;
  std::optional<std::string> workflow_id;
  bool wait = false, as_json = false;
  int poll_ms = 500;
  transfer_cmd->add_option("--source", source, "Source bucket")->required();
  transfer_cmd->add_option("--dest", dest, "Destination bucket")->required();
  transfer_cmd->add_option("--prefix", prefix, "Destination key prefix");
  transfer_cmd->add_option("--keys-file", keys_file, "File with one key per line");
  transfer_cmd->add_option("--workflow-id", workflow_id, "Idempotency UUID");
  transfer_cmd->add_flag("--wait", wait, "Block until every file is terminal");
  transfer_cmd->add_option("--poll-ms", poll_ms, "Status poll period with --wait");
  transfer_cmd->add_flag("--json", as_json, "Machine-readable output");
  transfer_cmd->add_option("keys", keys, "Object keys");

  auto* status = app.add_subcommand("status", "Show a transfer's status");
  std::string status_id;
  status->add_option("workflow_id", status_id)->required();
  status->add_flag("--json", as_json, "Machine-readable output");

  auto* bench = app.add_subcommand("bench", "In-process throughput run on the simulated store");
  harness::DatasetSpec bench_data = harness::DatasetSpec::fixed(64, 8 * store::kMiB);
  double latency_ms = 0;
  bench->add_option("--files", bench_data.file_count)->capture_default_str();
  bench->add_option("--min-size", bench_data.min_size)->capture_default_str();
  bench->add_option("--max-size", bench_data.max_size)->capture_default_str();
  bench->add_option("--seed", bench_data.seed)->capture_default_str();
  bench->add_option("--latency-ms", latency_ms, "Fixed per-request latency")->capture_default_str();
  bench->add_flag("--json", as_json, "Machine-readable output");

  auto* crash = app.add_subcommand("crash-test", "Crash and restart the service mid-transfer");
  harness::ScenarioOptions scenario;
  std::optional<std::string> scenario_file;
  std::optional<std::size_t> crash_files;
  std::optional<std::uint64_t> crash_size;
  std::vector<std::size_t> kill_after;
  std::optional<double> crash_latency_ms;
  std::optional<std::string> work_dir;
  bool no_restart = false;
  crash->add_option("--scenario", scenario_file, "Scenario JSON");
  crash->add_option("--files", crash_files);
  crash->add_option("--size", crash_size, "File size in bytes");
  crash->add_option("--kill-after", kill_after, "Successes before each crash (repeatable)");
  crash->add_option("--latency-ms", crash_latency_ms, "Fixed per-request latency");
  crash->add_option("--work-dir", work_dir);
  crash->add_flag("--no-restart", no_restart, "Leave the service down after the last crash");
  crash->add_flag("--json", as_json, "Machine-readable output");

  auto* cleanup = app.add_subcommand("cleanup", "Abort incomplete multipart uploads in a bucket");
  std::string cleanup_bucket;
  cleanup->add_option("bucket", cleanup_bucket)->required();
  cleanup->add_flag("--json", as_json, "Machine-readable output");

  auto* gen = app.add_subcommand("gen-dataset", "Write a deterministic dataset into a bucket");
  harness::DatasetSpec gen_data = harness::DatasetSpec::fixed(64, 8 * store::kMiB);
  std::string gen_bucket = "source";
  gen->add_option("--bucket", gen_bucket)->capture_default_str();
  gen->add_option("--files", gen_data.file_count)->capture_default_str();
  gen->add_option("--min-size", gen_data.min_size)->capture_default_str();
  gen->add_option("--max-size", gen_data.max_size)->capture_default_str();
  gen->add_option("--seed", gen_data.seed)->capture_default_str();
  gen->add_option("--key-prefix", gen_data.key_prefix)->capture_default_str();
  gen->add_flag("--json", as_json, "Machine-readable output");

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("mirror");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(c.log_level));

  try {
    const Resolved r = resolve(c);
    if (*serve) return cmd_serve(r);
    if (*transfer_cmd) {
      if (!keys_file.empty()) {
        std::ifstream in(keys_file);
        if (!in) throw Failure("cannot read " + keys_file);
        for (std::string line; std::getline(in, line);)
          if (!line.empty()) keys.push_back(line);
      }
      json body{{"source_bucket", source}, {"dest_bucket", dest}, {"keys", keys}, {"dest_prefix", prefix}};
      if (c.part_size) body["part_size"] = *c.part_size;
      if (c.file_parallelism) body["file_parallelism"] = *c.file_parallelism;
      return cmd_transfer(r, body, workflow_id, wait, as_json, poll_ms);
    }
    if (*status) return cmd_status(r, status_id, as_json);
    if (*bench) {
      harness::BenchOptions o;
      o.dataset = bench_data;
      o.engine = r.engine;
      o.engine.poll_interval = std::min(o.engine.poll_interval, std::chrono::milliseconds(100));
      o.faults.latency_min = o.faults.latency_max =
          std::chrono::microseconds(static_cast<std::int64_t>(latency_ms * 1000.0));
      auto result = harness::run_bench(o);
      if (as_json) std::cout << json(result.report).dump(2) << "\n";
      else std::cout << result.report.table();
      if (!result.content_mismatches.empty()) throw Failure("content mismatch on " + result.content_mismatches.front());
      return result.snapshot.counts.failed == 0 ? 0 : 1;
    }
    if (*crash) {
      if (scenario_file) from_json(read_json_file(*scenario_file), scenario);
      scenario.mirror_binary = fs::read_symlink("/proc/self/exe");
      if (!scenario_file) scenario.engine = r.engine;
      if (crash_files) scenario.dataset.file_count = *crash_files;
      if (crash_size) scenario.dataset.min_size = scenario.dataset.max_size = *crash_size;
      if (!kill_after.empty()) scenario.kill_after = kill_after;
      if (crash_latency_ms) {
        scenario.faults.latency_min = scenario.faults.latency_max =
            std::chrono::microseconds(static_cast<std::int64_t>(*crash_latency_ms * 1000.0));
      }
      if (work_dir) scenario.work_dir = *work_dir;
      if (scenario.work_dir.empty()) scenario.work_dir = fs::temp_directory_path() / "s3mirror-crash-test";
      if (no_restart) scenario.restart_after_last = false;
      auto report = harness::run_crash_scenario(scenario);
      if (as_json) {
        std::cout << json(report).dump(2) << "\n";
      } else {
        for (const auto& k : report.crashes)
          std::cout << "crash after " << k.threshold << ": " << k.exit << ", " << k.success_before.size()
                    << " succeeded before, " << k.open_uploads << " open upload(s)\n";
        std::cout << "re-executed after restart: " << report.re_executed.size() << " file(s)\n";
        std::cout << "open uploads at end: " << report.open_uploads_after << "\n";
        if (report.final_snapshot) render(*report.final_snapshot, std::cout);
        std::cout << "sim dir: " << report.sim_dir.string() << "\n";
      }
      const bool ok = !scenario.restart_after_last ||
                      (report.final_snapshot && report.final_snapshot->counts.failed == 0 &&
                       report.content_mismatches.empty());
      return ok ? 0 : 1;
    }
    if (*cleanup) return cmd_cleanup(r, cleanup_bucket, as_json);
    if (*gen) return cmd_gen_dataset(r, gen_data, gen_bucket, as_json);
  } catch (const std::exception& e) {
    std::cerr << "mirror: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
