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

#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "s3mirror/transfer/types.hpp"

namespace s3mirror::harness {

inline constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;
inline constexpr double kTiB = kGiB * 1024.0;
inline constexpr double kGB = 1e9;

struct BenchReport {
  std::size_t files = 0;
  std::uint64_t bytes_total = 0;
  double duration = 0.0;  // seconds
  double rate = 0.0;      // bytes per second
  std::vector<transfer::FileTask> per_file;
  std::int64_t max_inflight_observed = 0;

  double rate_gib_s() const { return rate / kGiB; }
  double rate_gb_s() const { return rate / kGB; }
  /// Aligned plain-text summary.
  std::string table() const;
};

void to_json(nlohmann::json& j, const BenchReport& r);

/// rate = bytes_total / duration, 0 when duration is 0.
BenchReport report_benchmark(std::uint64_t bytes_total, double duration_s,
                             std::vector<transfer::FileTask> per_file = {},
                             std::int64_t max_inflight_observed = 0);
/// Uses the snapshot's successful bytes and frozen elapsed time.
BenchReport report_benchmark(const transfer::TransferStatusSnapshot& snapshot,
                             std::int64_t max_inflight_observed);

/// Seconds needed to move `bytes` at `bytes_per_second`.
double transfer_seconds(double bytes, double bytes_per_second);

}  // namespace s3mirror::harness
