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

#include <thread>

#include "s3mirror/common/digest.hpp"
#include "s3mirror/store/content.hpp"
#include "s3mirror/store/simulated_store.hpp"
#include "support.hpp"

namespace s3mirror::store {
namespace {

using s3mirror::testing::TempDir;

class SimStoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    sim.create_bucket("src");
    sim.create_bucket("dst");
  }
  SimulatedStore sim;
};

TEST_F(SimStoreTest, HeadReportsSize) {
  sim.put_generated({"src", "big"}, 100 * kMiB, 1);
  EXPECT_EQ(sim.head_object({"src", "big"}).size, 104857600u);
}

TEST_F(SimStoreTest, HeadMissingKeyIsNotFound) {
  try {
    sim.head_object({"src", "missing"});
    FAIL();
  } catch (const StoreError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFound);
  }
}

TEST_F(SimStoreTest, DeniedKeyIsPermissionDenied) {
  sim.put_object({"src", "secret"}, "x");
  FaultPlan plan;
  plan.denied_keys = {"secret"};
  sim.set_fault_plan(plan);
  try {
    sim.head_object({"src", "secret"});
    FAIL();
  } catch (const StoreError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PermissionDenied);
    EXPECT_FALSE(is_retryable(e.kind()));
  }
}

TEST_F(SimStoreTest, UnreadableFlagDeniesReads) {
  sim.put_object({"src", "k"}, "abc");
  sim.set_readable({"src", "k"}, false);
  EXPECT_THROW(sim.head_object({"src", "k"}), StoreError);
}

TEST_F(SimStoreTest, ReferencesAreValidated) {
  EXPECT_THROW(sim.head_object({"src", "/leading"}), StoreError);
  EXPECT_THROW(sim.head_object({"", "k"}), StoreError);
  EXPECT_THROW(sim.create_multipart({"nobucket", "k"}), StoreError);
}

TEST_F(SimStoreTest, GeneratedContentMatchesGenerator) {
  sim.put_generated({"src", "g"}, 1000, 42);
  EXPECT_EQ(sim.read_object({"src", "g"}), generate_content(42, 1000));
  EXPECT_EQ(sim.content_hash({"src", "g"}), sha256_hex(generate_content(42, 1000)));
}

TEST_F(SimStoreTest, MultipartCopyOutOfOrderReassemblesSource) {
  const std::string data = generate_content(9, 10'000);
  sim.put_object({"src", "k"}, data);
  auto up = sim.create_multipart({"dst", "k"});
  EXPECT_EQ(up.state, UploadState::Open);
  EXPECT_FALSE(sim.exists({"dst", "k"}));
  const auto parts = compute_parts(data.size(), 3000);
  std::vector<std::string> etags(parts.size());
  for (auto it = parts.rbegin(); it != parts.rend(); ++it)
    etags[it->part_number - 1] = sim.upload_part_copy(up, {"src", "k"}, *it);
  sim.complete_multipart(up, etags);
  EXPECT_EQ(up.state, UploadState::Completed);
  EXPECT_EQ(sim.read_object({"dst", "k"}), data);
  EXPECT_EQ(sim.content_hash({"dst", "k"}), sim.content_hash({"src", "k"}));
  EXPECT_EQ(sim.instrument().completed_copies.at("dst/k"), 1u);
}

TEST_F(SimStoreTest, CompleteRequiresEveryPart) {
  sim.put_object({"src", "k"}, std::string(100, 'a'));
  auto up = sim.create_multipart({"dst", "k"});
  const auto parts = compute_parts(100, 40);
  ASSERT_EQ(parts.size(), 3u);
  // Part 2 is never copied.
  std::vector<std::string> etags{sim.upload_part_copy(up, {"src", "k"}, parts[0]), "etag-2",
                                 sim.upload_part_copy(up, {"src", "k"}, parts[2])};
  try {
    sim.complete_multipart(up, etags);
    FAIL();
  } catch (const StoreError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingPart);
  }
  EXPECT_FALSE(sim.exists({"dst", "k"}));
  etags[1] = sim.upload_part_copy(up, {"src", "k"}, parts[1]);
  etags[2] = "bogus";
  EXPECT_THROW(sim.complete_multipart(up, etags), StoreError);
  etags[2] = sim.upload_part_copy(up, {"src", "k"}, parts[2]);
  sim.complete_multipart(up, etags);
  EXPECT_EQ(sim.head_object({"dst", "k"}).size, 100u);
}

TEST_F(SimStoreTest, InvalidRangeIsRejected) {
  sim.put_object({"src", "k"}, "0123456789");
  auto up = sim.create_multipart({"dst", "k"});
  try {
    sim.upload_part_copy(up, {"src", "k"}, PartSpec{1, 5, 10});
    FAIL();
  } catch (const StoreError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RangeInvalid);
  }
}

TEST_F(SimStoreTest, AbortDropsPartsAndAccounting) {
  sim.put_object({"src", "k"}, std::string(1000, 'z'));
  auto up = sim.create_multipart({"dst", "k"});
  sim.upload_part_copy(up, {"src", "k"}, PartSpec{1, 0, 499});
  EXPECT_EQ(sim.accounting().open_upload_bytes, 500u);
  EXPECT_EQ(sim.list_incomplete_uploads("dst").size(), 1u);
  sim.abort_multipart(up);
  EXPECT_EQ(up.state, UploadState::Aborted);
  EXPECT_EQ(sim.accounting().open_upload_bytes, 0u);
  EXPECT_TRUE(sim.list_incomplete_uploads("dst").empty());
  EXPECT_THROW(sim.upload_part_copy(up, {"src", "k"}, PartSpec{2, 500, 999}), StoreError);
  EXPECT_NO_THROW(sim.abort_multipart(up));
}

TEST_F(SimStoreTest, DirectCopyOfEmptyObject) {
  sim.put_object({"src", "empty"}, "");
  sim.copy_object({"src", "empty"}, {"dst", "empty"});
  EXPECT_EQ(sim.head_object({"dst", "empty"}).size, 0u);
  EXPECT_EQ(sim.instrument().completed_copies.at("dst/empty"), 1u);
}

TEST_F(SimStoreTest, ForcedFailuresAreConsumedPerKey) {
  sim.put_object({"src", "flaky"}, "abc");
  FaultPlan plan;
  plan.intermittent_fail_counts = {{"flaky", 2}};
  sim.set_fault_plan(plan);
  for (int i = 0; i < 2; ++i) {
    try {
      sim.head_object({"src", "flaky"});
      FAIL();
    } catch (const StoreError& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Intermittent);
    }
  }
  EXPECT_EQ(sim.head_object({"src", "flaky"}).size, 3u);
}

std::vector<bool> outcome_sequence(std::uint64_t seed) {
  SimulatedStore s;
  s.create_bucket("b");
  s.put_object({"b", "k"}, "x");
  FaultPlan plan;
  plan.intermittent_error_rate = 0.3;
  plan.seed = seed;
  s.set_fault_plan(plan);
  std::vector<bool> out;
  for (int i = 0; i < 200; ++i) {
    try {
      s.head_object({"b", "k"});
      out.push_back(true);
    } catch (const StoreError&) {
      out.push_back(false);
    }
  }
  return out;
}

TEST(FaultPlanTest, SameSeedReplaysIdentically) {
  const auto a = outcome_sequence(5);
  EXPECT_EQ(a, outcome_sequence(5));
  EXPECT_NE(a, outcome_sequence(6));
  const auto failures = std::count(a.begin(), a.end(), false);
  EXPECT_GT(failures, 30);
  EXPECT_LT(failures, 90);
}

TEST(FaultPlanTest, JsonRoundTrip) {
  FaultPlan p;
  p.intermittent_error_rate = 0.25;
  p.intermittent_fail_counts = {{"a", 2}};
  p.denied_keys = {"b"};
  p.latency_min = std::chrono::microseconds(100);
  p.latency_max = std::chrono::microseconds(200);
  p.seed = 9;
  const FaultPlan q = nlohmann::json(p).get<FaultPlan>();
  EXPECT_EQ(q.intermittent_error_rate, 0.25);
  EXPECT_EQ(q.intermittent_fail_counts, p.intermittent_fail_counts);
  EXPECT_EQ(q.denied_keys, p.denied_keys);
  EXPECT_EQ(q.latency_min, p.latency_min);
  EXPECT_EQ(q.latency_max, p.latency_max);
  EXPECT_EQ(q.seed, 9u);
  EXPECT_EQ(nlohmann::json::parse(R"({"latency_ms": 50})").get<FaultPlan>().latency_min.count(), 50'000);
}

TEST(FaultPlanTest, FixedLatencyIsApplied) {
  SimulatedStore s({FaultPlan::fixed_latency(std::chrono::milliseconds(20)), std::nullopt});
  s.create_bucket("b");
  s.put_object({"b", "k"}, "x");
  const auto t0 = std::chrono::steady_clock::now();
  s.head_object({"b", "k"});
  EXPECT_GE(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(20));
}

TEST(SimStorePersistence, StateIsSharedThroughTheDirectory) {
  TempDir dir;
  {
    SimulatedStore a({{}, dir.path()});
    a.create_bucket("b");
    a.put_object({"b", "literal"}, "hello world");
    a.put_generated({"b", "gen"}, 5000, 3);
    auto up = a.create_multipart({"b", "copy"});
    a.upload_part_copy(up, {"b", "gen"}, PartSpec{1, 0, 999});
  }
  SimulatedStore b({{}, dir.path()});
  EXPECT_EQ(b.read_object({"b", "literal"}), "hello world");
  EXPECT_EQ(b.read_object({"b", "gen"}), generate_content(3, 5000));
  auto open = b.list_incomplete_uploads("b");
  ASSERT_EQ(open.size(), 1u);
  EXPECT_EQ(b.accounting().open_upload_bytes, 1000u);

  // A second live instance sees updates made by the first.
  SimulatedStore c({{}, dir.path()});
  b.abort_multipart(open[0]);
  EXPECT_TRUE(c.list_incomplete_uploads("b").empty());
}

TEST_F(SimStoreTest, InflightCountsConcurrentPartCopies) {
  SimulatedStore slow({FaultPlan::fixed_latency(std::chrono::milliseconds(30)), std::nullopt});
  slow.create_bucket("b");
  slow.put_generated({"b", "src"}, 4000, 1);
  auto up = slow.create_multipart({"b", "dst"});
  slow.reset_max_inflight();
  std::vector<std::thread> ts;
  for (int i = 0; i < 4; ++i)
    ts.emplace_back([&, i] { slow.upload_part_copy(up, {"b", "src"}, PartSpec{i + 1, i * 1000ull, i * 1000ull + 999}); });
  for (auto& t : ts) t.join();
  EXPECT_EQ(slow.instrument().max_inflight, 4);
  EXPECT_EQ(slow.instrument().inflight_writes, 0);
}

}  // namespace
}  // namespace s3mirror::store
