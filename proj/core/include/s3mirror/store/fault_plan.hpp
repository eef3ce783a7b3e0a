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

#include <chrono>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>

namespace s3mirror::store {

/// Deterministic fault schedule for the simulated store. Every decision is a
/// pure function of (seed, request identity, occurrence number of that
/// identity), so thread interleaving does not change outcomes.
struct FaultPlan {
  double intermittent_error_rate = 0.0;
  /// key -> number of consecutive source-read requests (head, part copy,
  /// direct copy) on that key that fail with an intermittent error.
  std::map<std::string, int> intermittent_fail_counts;
  /// Keys whose reads fail with PermissionDenied.
  std::set<std::string> denied_keys;
  /// Per-request latency, uniform in [latency_min, latency_max]; equal bounds
  /// give a fixed latency.
  std::chrono::microseconds latency_min{0};
  std::chrono::microseconds latency_max{0};
  std::uint64_t seed = 0;

  static FaultPlan fixed_latency(std::chrono::microseconds latency) {
    FaultPlan p;
    p.latency_min = p.latency_max = latency;
    return p;
  }
};

void to_json(nlohmann::json& j, const FaultPlan& p);
void from_json(const nlohmann::json& j, FaultPlan& p);

}  // namespace s3mirror::store
