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

#include <gtest/gtest.h>

#include <cmath>

#include "s3mirror/harness/bench.hpp"
#include "s3mirror/harness/cost.hpp"
#include "s3mirror/harness/dataset.hpp"
#include "s3mirror/harness/report.hpp"
#include "s3mirror/store/simulated_store.hpp"

namespace s3mirror::harness {
namespace {

using nlohmann::json;

TEST(DatasetTest, PlanIsDeterministic) {
  DatasetSpec spec;
  spec.file_count = 20;
  spec.min_size = 100;
  spec.max_size = 5000;
  spec.seed = 7;
  auto a = plan_dataset(spec);
  auto b = plan_dataset(spec);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].key, b[i].key);
    EXPECT_EQ(a[i].size, b[i].size);
    EXPECT_EQ(a[i].content_seed, b[i].content_seed);
    EXPECT_GE(a[i].size, 100u);
    EXPECT_LE(a[i].size, 5000u);
  }
  EXPECT_EQ(a[3].key, "data/file-00003.bin");
  spec.seed = 8;
  auto c = plan_dataset(spec);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].size != c[i].size;
  EXPECT_TRUE(differs);
}

TEST(DatasetTest, GenerateWritesEveryObject) {
  store::SimulatedStore sim;
  sim.create_bucket("b");
  auto manifest = generate_dataset(sim, DatasetSpec::fixed(6, 1000), "b");
  EXPECT_EQ(sim.list_objects("b").size(), 6u);
  for (const auto& e : manifest) EXPECT_EQ(sim.head_object({"b", e.key}).size, 1000u);
  EXPECT_TRUE(generate_dataset(sim, DatasetSpec::fixed(0, 10), "b").empty());
}

TEST(DatasetTest, JsonAndValidation) {
  auto s = json{{"file_count", 3}, {"size", 4096}}.get<DatasetSpec>();
  EXPECT_EQ(s.file_count, 3u);
  EXPECT_EQ(s.min_size, 4096u);
  EXPECT_EQ(s.max_size, 4096u);
  DatasetSpec bad;
  bad.min_size = 10;
  bad.max_size = 5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(CostTest, PerGbBilling) {
  // 11.88 TiB, billed per binary GB.
  const auto bytes = static_cast<std::uint64_t>(std::llround(11.88 * kTiB));
  EXPECT_EQ(compute_cost(bytes, PerGbPricing{}).str(), "$183.03");
  // A whole number of GB: 12,165 GB.
  EXPECT_EQ(compute_cost(12'165ull << 30, PerGbPricing{}).cents, 18'303);
}

TEST(CostTest, PerCpuMs) {
  EXPECT_EQ(compute_cost(2'000'000, PerCpuMsPricing{}).str(), "$0.10");
  EXPECT_EQ(compute_cost(0, PerCpuMsPricing{}).str(), "$0.00");
  EXPECT_EQ(compute_cost(0, PerGbPricing{}).str(), "$0.55");
}

TEST(CostTest, RoundsHalfUpOnce) {
  // 1 GB at 15000 micros + 5000 micros fee = 20000 micros = 2 cents.
  EXPECT_EQ(compute_cost(1ull << 30, PerGbPricing{15'000, 5'000}).cents, 2);
  // 0.5 cent rounds up.
  EXPECT_EQ(compute_cost(0, PerGbPricing{0, 5'000}).cents, 1);
  EXPECT_EQ(compute_cost(0, PerGbPricing{0, 4'999}).cents, 0);
  PerGbPricing decimal;
  decimal.bytes_per_gb = 1'000'000'000;
  EXPECT_EQ(compute_cost(2'000'000'000, decimal).cents, 3 + 55);
}

TEST(ReportTest, TransferTimesMatchRates) {
  const double bytes = 11.88 * kTiB;
  EXPECT_NEAR(transfer_seconds(bytes, 24.9 * kGiB) / 60.0, 8.1, 0.1);
  EXPECT_NEAR(transfer_seconds(bytes, 4.1 * kGiB) / 60.0, 49.5, 0.1);
  EXPECT_NEAR(transfer_seconds(bytes, 622.03 * 1024 * 1024) / 3600.0, 5.6, 0.05);
  EXPECT_GE(transfer_seconds(bytes, 200.0 * 1024 * 1024) / 3600.0, 17.0);
  // The rounded 0.2 GiB/s label lands just under 17 h.
  EXPECT_NEAR(transfer_seconds(bytes, 0.2 * kGiB) / 3600.0, 16.9, 0.05);
}

TEST(ReportTest, ReportBenchmarkRates) {
  auto r = report_benchmark(static_cast<std::uint64_t>(11.88 * kTiB), 8.1 * 60);
  EXPECT_NEAR(r.rate_gib_s(), 25.03, 0.01);
  EXPECT_EQ(report_benchmark(100, 0).rate, 0.0);
  json j = r;
  EXPECT_TRUE(j.contains("rate_gib_s"));
  EXPECT_NE(r.table().find("GiB/s"), std::string::npos);
}

TEST(BenchTest, SmokeRunCopiesEverything) {
  BenchOptions opts;
  opts.dataset = DatasetSpec::fixed(16, 2 * store::kMiB);
  opts.engine.part_size_bounds = {256 * 1024, 128 * store::kMiB};
  opts.engine.part_size = 512 * 1024;
  opts.engine.poll_interval = std::chrono::milliseconds(20);
  opts.engine.queue = {4, 4};
  auto res = run_bench(opts);
  EXPECT_TRUE(res.snapshot.complete);
  EXPECT_EQ(res.snapshot.counts.success, 16u);
  EXPECT_EQ(res.report.bytes_total, 32 * store::kMiB);
  EXPECT_GT(res.report.rate, 0.0);
  EXPECT_TRUE(res.content_mismatches.empty());
  EXPECT_GT(res.report.max_inflight_observed, 0);
}

}  // namespace
}  // namespace s3mirror::harness
