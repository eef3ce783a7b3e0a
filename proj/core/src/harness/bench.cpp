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

#include "s3mirror/harness/bench.hpp"

#include <unistd.h>

#include <random>

#include "s3mirror/store/simulated_store.hpp"

namespace s3mirror::harness {

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  std::random_device rd;
  auto dir = fs::temp_directory_path() /
             (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(rd()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

BenchResult run_bench(const BenchOptions& options) {
  const bool own_dir = !options.work_dir;
  const fs::path dir = own_dir ? fresh_dir("s3mirror-bench") : *options.work_dir;
  fs::create_directories(dir);

  store::SimulatedStore sim({options.faults, std::nullopt});
  sim.create_bucket("source");
  sim.create_bucket("dest");
  const auto manifest = generate_dataset(sim, options.dataset, "source");

  BenchResult result;
  {
    durable::RuntimeOptions ro;
    ro.db_path = (dir / "bench.db").string();
    fs::remove(ro.db_path);
    durable::Runtime runtime(ro);
    transfer::TransferEngine engine(runtime, sim, options.engine);
    runtime.launch();
    sim.reset_max_inflight();

    transfer::TransferRequest req;
    req.source_bucket = "source";
    req.dest_bucket = "dest";
    req.keys = keys_of(manifest);
    req.part_size = options.engine.part_size;
    req.file_parallelism = options.engine.file_parallelism;
    auto handle = engine.start(req);
    if (!handle.wait(options.timeout, std::chrono::milliseconds(10)))
      throw std::runtime_error("benchmark transfer did not finish within the timeout");
    auto snap = engine.status(handle.id());
    runtime.shutdown();
    if (!snap) throw std::runtime_error("benchmark transfer has no status");
    result.snapshot = *snap;
  }
  result.report = report_benchmark(result.snapshot, sim.instrument().max_inflight);
  if (options.verify_content) {
    for (const auto& t : result.snapshot.tasks) {
      if (t.status != transfer::FileStatus::Success) continue;
      if (sim.content_hash({"source", t.key}) != sim.content_hash({"dest", t.key}))
        result.content_mismatches.push_back(t.key);
    }
  }
  if (own_dir) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  return result;
}

}  // namespace s3mirror::harness
