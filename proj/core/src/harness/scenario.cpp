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

#include "s3mirror/harness/scenario.hpp"

#include <sys/wait.h>

#include <fstream>
#include <thread>

#include "s3mirror/durable/store.hpp"
#include "s3mirror/harness/client.hpp"
#include "s3mirror/harness/process.hpp"
#include "s3mirror/store/simulated_store.hpp"

namespace s3mirror::harness {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

void to_json(json& j, const ScenarioOptions& o) {
  j = {{"mirror_binary", o.mirror_binary.string()},
       {"work_dir", o.work_dir.string()},
       {"dataset", o.dataset},
       {"engine", o.engine},
       {"faults", o.faults},
       {"kill_after", o.kill_after},
       {"restart_after_last", o.restart_after_last},
       {"worker_id", o.worker_id},
       {"timeout_s", o.timeout.count()},
       {"verify_content", o.verify_content}};
}

void from_json(const json& j, ScenarioOptions& o) {
  if (j.contains("mirror_binary")) o.mirror_binary = j.at("mirror_binary").get<std::string>();
  if (j.contains("work_dir")) o.work_dir = j.at("work_dir").get<std::string>();
  if (j.contains("dataset")) from_json(j.at("dataset"), o.dataset);
  if (j.contains("engine")) transfer::from_json(j.at("engine"), o.engine);
  if (j.contains("faults")) o.faults = j.at("faults").get<store::FaultPlan>();
  if (j.contains("kill_after")) o.kill_after = j.at("kill_after").get<std::vector<std::size_t>>();
  o.restart_after_last = j.value("restart_after_last", o.restart_after_last);
  o.worker_id = j.value("worker_id", o.worker_id);
  if (j.contains("timeout_s")) o.timeout = std::chrono::seconds(j.at("timeout_s").get<int>());
  o.verify_content = j.value("verify_content", o.verify_content);
}

void to_json(json& j, const ScenarioReport& r) {
  json crashes = json::array();
  for (const auto& c : r.crashes) {
    crashes.push_back({{"threshold", c.threshold},
                       {"exit", c.exit},
                       {"success_before", c.success_before},
                       {"success_before_count", c.success_before.size()},
                       {"open_uploads", c.open_uploads}});
  }
  j = {{"workflow_id", r.workflow_id.str()},
       {"crashes", crashes},
       {"re_executed", r.re_executed},
       {"completed_copies", r.completed_copies},
       {"content_mismatches", r.content_mismatches},
       {"open_uploads_after", r.open_uploads_after},
       {"duration", r.duration},
       {"db_path", r.db_path.string()},
       {"sim_dir", r.sim_dir.string()},
       {"final_snapshot", r.final_snapshot ? json(*r.final_snapshot) : json(nullptr)}};
}

namespace {

constexpr const char* kSource = "source";
constexpr const char* kDest = "dest";

struct Layout {
  fs::path db, sim, config, faults;
};

std::map<std::string, std::uint64_t> by_source_key(const std::map<std::string, std::uint64_t>& m) {
  const std::string prefix = std::string(kDest) + "/";
  std::map<std::string, std::uint64_t> out;
  for (const auto& [k, v] : m)
    if (k.rfind(prefix, 0) == 0) out[k.substr(prefix.size())] = v;
  return out;
}

class Scenario {
 public:
  explicit Scenario(const ScenarioOptions& o) : o_(o) {}

  ScenarioReport run() {
    const auto t0 = Clock::now();
    deadline_ = t0 + o_.timeout;
    prepare();
    report_.workflow_id = Uuid::random();

    start_service();
    submit();

    std::optional<store::StoreMetrics> at_first_crash;
    for (std::size_t i = 0; i < o_.kill_after.size(); ++i) {
      CrashRecord crash = crash_at(o_.kill_after[i]);
      if (!at_first_crash) at_first_crash = open_sim().instrument();
      report_.crashes.push_back(std::move(crash));
      const bool last = i + 1 == o_.kill_after.size();
      if (!last || o_.restart_after_last) start_service();
    }

    auto sim = open_sim();
    if (service_) {
      wait_for_completion();
      ServiceClient client("127.0.0.1", port_);
      report_.final_snapshot = client.snapshot(report_.workflow_id);
      service_->terminate();
      service_.reset();
    }

    const auto metrics = sim.instrument();
    report_.completed_copies = by_source_key(metrics.completed_copies);
    if (at_first_crash) {
      const auto before_done = by_source_key(at_first_crash->completed_copies);
      const auto before_up = by_source_key(at_first_crash->uploads_started);
      const auto after_up = by_source_key(metrics.uploads_started);
      const auto get = [](const auto& m, const std::string& k) {
        auto it = m.find(k);
        return it == m.end() ? std::uint64_t{0} : it->second;
      };
      for (const auto& e : manifest_) {
        if (get(report_.completed_copies, e.key) > get(before_done, e.key) ||
            get(after_up, e.key) > get(before_up, e.key))
          report_.re_executed.insert(e.key);
      }
    }
    report_.open_uploads_after = sim.list_incomplete_uploads(kDest).size();
    if (o_.verify_content && report_.final_snapshot) {
      for (const auto& t : report_.final_snapshot->tasks) {
        if (t.status != transfer::FileStatus::Success) continue;
        if (sim.content_hash({kSource, t.key}) != sim.content_hash({kDest, t.key}))
          report_.content_mismatches.push_back(t.key);
      }
    }
    report_.duration = std::chrono::duration<double>(Clock::now() - t0).count();
    return report_;
  }

 private:
  store::SimulatedStore open_sim() const { return store::SimulatedStore({{}, layout_.sim}); }

  void prepare() {
    if (o_.mirror_binary.empty() || !fs::exists(o_.mirror_binary))
      throw std::runtime_error("mirror binary not found: " + o_.mirror_binary.string());
    fs::remove_all(o_.work_dir);
    fs::create_directories(o_.work_dir);
    layout_.db = o_.work_dir / "mirror.db";
    layout_.sim = o_.work_dir / "sim";
    layout_.config = o_.work_dir / "config.json";
    layout_.faults = o_.work_dir / "faults.json";
    report_.db_path = layout_.db;
    report_.sim_dir = layout_.sim;
    std::ofstream(layout_.config) << json(o_.engine).dump(2);
    std::ofstream(layout_.faults) << json(o_.faults).dump(2);

    auto sim = open_sim();
    sim.create_bucket(kSource);
    sim.create_bucket(kDest);
    manifest_ = generate_dataset(sim, o_.dataset, kSource);
  }

  void start_service() {
    port_ = pick_free_port();
    const auto log = o_.work_dir / ("serve-" + std::to_string(++generation_) + ".log");
    service_ = std::make_unique<ChildProcess>(
        o_.mirror_binary,
        std::vector<std::string>{"serve", "--db", layout_.db.string(), "--listen",
                                 "127.0.0.1:" + std::to_string(port_), "--sim-dir",
                                 layout_.sim.string(), "--faults", layout_.faults.string(),
                                 "--config", layout_.config.string(), "--worker-id", o_.worker_id},
        std::map<std::string, std::string>{{"MIRROR_TEST_MODE", "1"}, {"MIRROR_BACKEND", "sim"}}, log);
    ServiceClient client("127.0.0.1", port_);
    while (!client.healthy()) {
      if (!service_->running())
        throw std::runtime_error("service exited during startup; see " + log.string());
      check_deadline("service startup");
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }

  void submit() {
    transfer::TransferRequest req;
    req.source_bucket = kSource;
    req.dest_bucket = kDest;
    req.keys = keys_of(manifest_);
    req.part_size = o_.engine.part_size;
    req.file_parallelism = o_.engine.file_parallelism;
    json body = req;
    body["workflow_id"] = report_.workflow_id.str();
    ServiceClient client("127.0.0.1", port_);
    auto reply = client.start_transfer(body);
    if (!reply.ok()) throw std::runtime_error("start_transfer failed: HTTP " + std::to_string(reply.status) + " " + reply.body);
  }

  std::set<std::string> successes(const durable::DurableStore& db) const {
    std::set<std::string> keys;
    for (const auto& child : db.children_of(report_.workflow_id))
      if (child.status == durable::WorkflowStatus::Success)
        keys.insert(child.input.at("key").get<std::string>());
    return keys;
  }

  CrashRecord crash_at(std::size_t threshold) {
    durable::DurableStore db(layout_.db.string());
    while (successes(db).size() < threshold) {
      if (!service_->running()) throw std::runtime_error("service died before the crash point");
      check_deadline("crash threshold");
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    ServiceClient("127.0.0.1", port_).crash();
    auto status = service_->wait(std::chrono::seconds(10));
    if (!status) throw std::runtime_error("service did not exit after /crash");
    service_.reset();

    CrashRecord c;
    c.threshold = threshold;
    c.exit = describe_wait_status(*status);
    c.exited_nonzero = !(WIFEXITED(*status) && WEXITSTATUS(*status) == 0);
    c.success_before = successes(db);
    c.open_uploads = open_sim().list_incomplete_uploads(kDest).size();
    return c;
  }

  void wait_for_completion() {
    durable::DurableStore db(layout_.db.string());
    for (;;) {
      auto rec = db.get_workflow(report_.workflow_id);
      if (rec && rec->status != durable::WorkflowStatus::Pending) return;
      if (!service_->running()) throw std::runtime_error("service exited before the transfer finished");
      check_deadline("transfer completion");
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }

  void check_deadline(const std::string& what) const {
    if (Clock::now() > deadline_) throw std::runtime_error("scenario timed out waiting for " + what);
  }

  const ScenarioOptions& o_;
  Layout layout_;
  std::vector<DatasetEntry> manifest_;
  std::unique_ptr<ChildProcess> service_;
  int port_ = 0;
  int generation_ = 0;
  Clock::time_point deadline_;
  ScenarioReport report_;
};

}  // namespace

ScenarioReport run_crash_scenario(const ScenarioOptions& options) { return Scenario(options).run(); }

}  // namespace s3mirror::harness
