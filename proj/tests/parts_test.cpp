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

#include <random>

#include "s3mirror/store/types.hpp"

namespace s3mirror::store {
namespace {

// Brute-force oracle: paint every byte with its covering part and check that
// each byte is covered exactly once and parts appear in ascending order.
::testing::AssertionResult tiles_exactly(std::uint64_t size, std::uint64_t part_size,
                                         const std::vector<PartSpec>& parts) {
  std::vector<int> owner(size, 0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (p.part_number != static_cast<int>(i + 1))
      return ::testing::AssertionFailure() << "part " << i << " numbered " << p.part_number;
    if (p.start > p.end || p.end >= size)
      return ::testing::AssertionFailure() << "part " << p.part_number << " out of range";
    if (i + 1 < parts.size() && p.length() != part_size)
      return ::testing::AssertionFailure() << "non-final part " << p.part_number << " is short";
    if (p.length() > part_size) return ::testing::AssertionFailure() << "part too long";
    for (std::uint64_t b = p.start; b <= p.end; ++b) {
      if (owner[b] != 0) return ::testing::AssertionFailure() << "byte " << b << " covered twice";
      owner[b] = p.part_number;
    }
  }
  int last = 0;
  for (std::uint64_t b = 0; b < size; ++b) {
    if (owner[b] == 0) return ::testing::AssertionFailure() << "byte " << b << " uncovered";
    if (owner[b] < last) return ::testing::AssertionFailure() << "parts not ascending";
    last = owner[b];
  }
  return ::testing::AssertionSuccess();
}

TEST(ComputeParts, HundredMiBInSixteenMiBParts) {
  auto parts = compute_parts(100 * kMiB, 16 * kMiB);
  ASSERT_EQ(parts.size(), 7u);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(parts[i].length(), 16 * kMiB);
  EXPECT_EQ(parts[6].length(), 4 * kMiB);
  EXPECT_EQ(parts[6].end, 100 * kMiB - 1);
}

TEST(ComputeParts, ExactMultiple) {
  auto parts = compute_parts(16 * kMiB, 16 * kMiB);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0], (PartSpec{1, 0, 16 * kMiB - 1}));
}

TEST(ComputeParts, EmptyObjectHasNoParts) { EXPECT_TRUE(compute_parts(0, 16 * kMiB).empty()); }

TEST(ComputeParts, ZeroPartSizeIsRejected) { EXPECT_THROW(compute_parts(10, 0), std::invalid_argument); }

TEST(ComputeParts, RandomPairsTileExactly) {
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<std::uint64_t> size_dist(0, 4096);
  std::uniform_int_distribution<std::uint64_t> part_dist(1, 700);
  for (int i = 0; i < 2000; ++i) {
    const auto size = size_dist(rng);
    const auto part = part_dist(rng);
    const auto parts = compute_parts(size, part);
    ASSERT_TRUE(tiles_exactly(size, part, parts)) << size << "/" << part;
    EXPECT_EQ(parts.size(), (size + part - 1) / part);
  }
}

TEST(ComputeParts, LargeSizesSumCorrectly) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> size_dist(1, 1ull << 44);
  std::uniform_int_distribution<std::uint64_t> part_dist(8 * kMiB, 128 * kMiB);
  for (int i = 0; i < 200; ++i) {
    const auto size = size_dist(rng);
    const auto parts = compute_parts(size, part_dist(rng));
    std::uint64_t total = 0, next = 0;
    for (const auto& p : parts) {
      ASSERT_EQ(p.start, next);
      total += p.length();
      next = p.end + 1;
    }
    EXPECT_EQ(total, size);
  }
}

}  // namespace
}  // namespace s3mirror::store
